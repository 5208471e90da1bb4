#include "preflab/pool.hpp"

#include <algorithm>

#include "preflab/errors.hpp"

namespace preflab {

WorkerPool::WorkerPool(int n_threads) {
    if (n_threads < 1) throw InputError("WorkerPool: need >= 1 thread");
    threads_.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i)
        threads_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard<std::mutex> lock(mu_);
        stop_ = true;
    }
    cv_job_.notify_all();
    for (auto& t : threads_) t.join();
}

int WorkerPool::default_workers() {
    return std::max(1u, std::thread::hardware_concurrency());
}

void WorkerPool::submit(std::function<void()> job) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        queue_.push_back(std::move(job));
        ++in_flight_;
    }
    cv_job_.notify_one();
}

void WorkerPool::wait() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_done_.wait(lock, [this] { return in_flight_ == 0; });
    if (first_error_) {
        auto err = first_error_;
        first_error_ = nullptr;
        std::rethrow_exception(err);
    }
}

void WorkerPool::worker_loop() {
    for (;;) {
        std::function<void()> job;
        {
            std::unique_lock<std::mutex> lock(mu_);
            cv_job_.wait(lock, [this] { return stop_ || !queue_.empty(); });
            if (queue_.empty()) return;  // stop_ set and drained
            job = std::move(queue_.front());
            queue_.pop_front();
        }
        try {
            job();
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu_);
            if (!first_error_) first_error_ = std::current_exception();
        }
        {
            std::lock_guard<std::mutex> lock(mu_);
            --in_flight_;
        }
        cv_done_.notify_all();
    }
}

}  // namespace preflab
