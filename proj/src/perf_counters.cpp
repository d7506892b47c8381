#include "simdrt/bench.hpp"

#if defined(__linux__)
#include <linux/perf_event.h>
#include <sys/ioctl.h>
#include <sys/syscall.h>
#include <unistd.h>

#include <cstring>
#endif

namespace simdrt::bench {

#if defined(__linux__)

namespace {

int open_event(std::uint32_t type, std::uint64_t config, int group_fd) {
  perf_event_attr attr;
  std::memset(&attr, 0, sizeof attr);
  attr.size = sizeof attr;
  attr.type = type;
  attr.config = config;
  attr.disabled = group_fd == -1 ? 1 : 0;
  attr.exclude_kernel = 1;
  attr.exclude_hv = 1;
  attr.read_format = PERF_FORMAT_GROUP;
  return static_cast<int>(syscall(SYS_perf_event_open, &attr, 0, -1, group_fd, 0));
}

}  // namespace

PerfCounters::PerfCounters() {
  fds_[0] = open_event(PERF_TYPE_HARDWARE, PERF_COUNT_HW_INSTRUCTIONS, -1);
  if (fds_[0] < 0) return;
  fds_[1] = open_event(PERF_TYPE_HARDWARE, PERF_COUNT_HW_CACHE_MISSES, fds_[0]);
  fds_[2] = open_event(PERF_TYPE_HARDWARE, PERF_COUNT_HW_BRANCH_MISSES, fds_[0]);
  available_ = fds_[1] >= 0 && fds_[2] >= 0;
}

PerfCounters::~PerfCounters() {
  for (int fd : fds_) {
    if (fd >= 0) close(fd);
  }
}

void PerfCounters::start() {
  if (!available_) return;
  ioctl(fds_[0], PERF_EVENT_IOC_RESET, PERF_IOC_FLAG_GROUP);
  ioctl(fds_[0], PERF_EVENT_IOC_ENABLE, PERF_IOC_FLAG_GROUP);
}

HwCounts PerfCounters::stop() {
  HwCounts c;
  if (!available_) return c;
  ioctl(fds_[0], PERF_EVENT_IOC_DISABLE, PERF_IOC_FLAG_GROUP);
  std::uint64_t buf[4] = {};  // nr, then one value per event
  if (read(fds_[0], buf, sizeof buf) == static_cast<ssize_t>(sizeof buf) && buf[0] == 3) {
    c.instructions = buf[1];
    c.cache_misses = buf[2];
    c.branch_misses = buf[3];
  }
  return c;
}

#else

PerfCounters::PerfCounters() = default;
PerfCounters::~PerfCounters() = default;
void PerfCounters::start() {}
HwCounts PerfCounters::stop() { return {}; }

#endif

}  // namespace simdrt::bench
