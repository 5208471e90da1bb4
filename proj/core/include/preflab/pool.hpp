#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace preflab {

// Bounded worker pool for shared-nothing jobs. Exceptions thrown by jobs
// are rethrown from wait() (first one wins).
class WorkerPool {
public:
    explicit WorkerPool(int n_threads);
    ~WorkerPool();
    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    void submit(std::function<void()> job);
    void wait();

    static int default_workers();

private:
    void worker_loop();

    std::vector<std::thread> threads_;
    std::deque<std::function<void()>> queue_;
    std::mutex mu_;
    std::condition_variable cv_job_, cv_done_;
    int in_flight_ = 0;
    bool stop_ = false;
    std::exception_ptr first_error_;
};

}  // namespace preflab
