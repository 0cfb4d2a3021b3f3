#include "hypac/parallel.hpp"

#include <atomic>

namespace hypac {

namespace {
std::atomic<int> workers_setting{1};
}

int default_workers() { return std::max(1, workers_setting.load()); }
void set_default_workers(int workers) { workers_setting.store(std::max(1, workers)); }

}  // namespace hypac
