#include "hamhom/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#if defined(__linux__)
#include <sched.h>
#endif

namespace hamhom {

namespace {

std::atomic<int> g_override{0};

int available_cpus() {
#if defined(__linux__)
    // hardware_concurrency can report the whole machine inside a restricted
    // cpuset; the affinity mask is what we may actually run on.
    cpu_set_t set;
    if (sched_getaffinity(0, sizeof set, &set) == 0) {
        const int cnt = CPU_COUNT(&set);
        if (cnt > 0) return cnt;
    }
#endif
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

int env_threads() {
    if (const char* v = std::getenv("HAMHOM_THREADS")) {
        int n = std::atoi(v);
        if (n > 0) return n;
    }
    return available_cpus();
}

thread_local bool t_in_worker = false;

// One dispatch: a fixed chunk table, workers steal chunks by index. Chunk
// boundaries depend only on (n, chunks), so results cannot depend on which
// thread runs which chunk. body/errors point into the dispatching frame; they
// are only dereferenced for claimed chunks, all of which finish before the
// dispatch returns. Stragglers see an empty claim counter and touch nothing
// else, holding the Region itself alive through their shared_ptr.
struct Region {
    const std::function<void(std::size_t, std::size_t)>* body = nullptr;
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    std::vector<std::exception_ptr>* errors = nullptr;
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> remaining{0};
};

// Long-lived workers parked on a condition variable; spawning threads per
// call would dominate runtime for the many-small-steps solvers.
class Pool {
public:
    ~Pool() {
        {
            std::lock_guard<std::mutex> lk(mu_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& w : workers_) w.join();
    }

    void run(const std::shared_ptr<Region>& region) {
        const std::size_t chunks = region->ranges.size();
        ensure_workers(chunks - 1);
        {
            std::lock_guard<std::mutex> lk(mu_);
            region_ = region;
            ++epoch_;
        }
        cv_.notify_all();
        work_through(*region);
        {
            std::unique_lock<std::mutex> lk(done_mu_);
            done_cv_.wait(lk, [&] {
                return region->remaining.load(std::memory_order_acquire) == 0;
            });
        }
        std::lock_guard<std::mutex> lk(mu_);
        region_.reset();
    }

private:
    void ensure_workers(std::size_t want) {
        while (workers_.size() < want)
            workers_.emplace_back([this] { worker_loop(); });
    }

    void work_through(Region& region) {
        const std::size_t chunks = region.ranges.size();
        for (;;) {
            const std::size_t c = region.next.fetch_add(1, std::memory_order_relaxed);
            if (c >= chunks) break;
            t_in_worker = true;
            try {
                (*region.body)(region.ranges[c].first, region.ranges[c].second);
            } catch (...) {
                (*region.errors)[c] = std::current_exception();
            }
            t_in_worker = false;
            if (region.remaining.fetch_sub(1, std::memory_order_acq_rel) == 1) {
                std::lock_guard<std::mutex> lk(done_mu_);
                done_cv_.notify_all();
            }
        }
    }

    void worker_loop() {
        std::uint64_t seen = 0;
        for (;;) {
            std::shared_ptr<Region> region;
            {
                std::unique_lock<std::mutex> lk(mu_);
                cv_.wait(lk, [&] { return stop_ || epoch_ != seen; });
                if (stop_) return;
                seen = epoch_;
                region = region_;
            }
            if (region) work_through(*region);
        }
    }

    std::mutex mu_; // guards region_/epoch_/stop_
    std::mutex done_mu_;
    std::condition_variable cv_;
    std::condition_variable done_cv_;
    std::shared_ptr<Region> region_;
    std::uint64_t epoch_ = 0;
    bool stop_ = false;
    std::vector<std::thread> workers_; // grown only under g_dispatch_mu
};

Pool& pool() {
    static Pool p;
    return p;
}

// Serializes top-level dispatches; nested calls never reach the pool.
std::mutex g_dispatch_mu;

} // namespace

int thread_count() {
    int o = g_override.load(std::memory_order_relaxed);
    return o > 0 ? o : env_threads();
}

void set_thread_count(int n) {
    g_override.store(n > 0 ? n : 0, std::memory_order_relaxed);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t grain) {
    if (n == 0) return;
    int nt = thread_count();
    if (grain == 0) grain = 1;
    const std::size_t by_grain = n / grain;
    if (nt <= 1 || n == 1 || by_grain < 2 || t_in_worker) {
        body(0, n);
        return;
    }
    std::lock_guard<std::mutex> dispatch(g_dispatch_mu);
    const std::size_t chunks =
        std::min({static_cast<std::size_t>(nt), n, by_grain});
    const std::size_t base = n / chunks, rem = n % chunks;
    // One error slot per chunk so a failure is rethrown deterministically
    // (lowest chunk wins) regardless of thread timing.
    std::vector<std::exception_ptr> errors(chunks);
    auto region = std::make_shared<Region>();
    region->body = &body;
    region->errors = &errors;
    region->ranges.reserve(chunks);
    std::size_t begin = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t end = begin + base + (c < rem ? 1 : 0);
        region->ranges.emplace_back(begin, end);
        begin = end;
    }
    region->remaining.store(chunks, std::memory_order_release);
    pool().run(region);
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

} // namespace hamhom
