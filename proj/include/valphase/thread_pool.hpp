#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <mutex>
#include <thread>
#include <vector>

namespace valphase {

// Fixed-size pool reused across blocks so per-block stage dispatch does not
// pay thread creation.
class WorkerPool {
public:
    explicit WorkerPool(unsigned threads);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    unsigned size() const { return static_cast<unsigned>(threads_.size()); }

    std::future<void> submit(std::function<void()> job);

    // Runs all jobs on the pool and blocks until every one finished.
    // The first thrown exception is rethrown here.
    void run_all(std::vector<std::function<void()>> jobs);

private:
    void worker();

    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::packaged_task<void()>> queue_;
    bool stop_ = false;
    std::vector<std::thread> threads_;
};

}  // namespace valphase
