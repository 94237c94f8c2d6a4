#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rigidem {

// Tiny fork-join helper.  Work is split into fixed-size chunks that do not
// depend on the worker count, so reductions built on per-chunk partials give
// bit-identical results for any --threads setting.
class ThreadPool {
 public:
  static ThreadPool& instance() {
    static ThreadPool pool;
    return pool;
  }

  void set_threads(int n) { threads_.store(n < 1 ? 1 : n); }
  int threads() const { return threads_.load(); }

  // body(chunk_index) for chunk_index in [0, nchunks).  Nested calls run
  // serially on the calling thread.
  void run_chunks(std::int64_t nchunks, const std::function<void(std::int64_t)>& body) {
    if (nchunks <= 0) return;
    int nt = threads_.load();
    if (nt > nchunks) nt = static_cast<int>(nchunks);
    if (nt <= 1 || nesting_depth() > 0) {
      for (std::int64_t c = 0; c < nchunks; ++c) body(c);
      return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto worker = [&]() {
      ++nesting_depth();
      for (;;) {
        std::int64_t c = next.fetch_add(1);
        if (c >= nchunks) break;
        try {
          body(c);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mutex);
          if (!err) err = std::current_exception();
        }
      }
      --nesting_depth();
    };
    std::vector<std::thread> helpers;
    helpers.reserve(nt - 1);
    for (int t = 0; t < nt - 1; ++t) helpers.emplace_back(worker);
    worker();
    for (auto& h : helpers) h.join();
    if (err) std::rethrow_exception(err);
  }

 private:
  ThreadPool() = default;
  static int& nesting_depth() {
    thread_local int depth = 0;
    return depth;
  }
  std::atomic<int> threads_{1};
};

inline void set_thread_count(int n) { ThreadPool::instance().set_threads(n); }
inline int thread_count() { return ThreadPool::instance().threads(); }

// Parallel loop over [0, count) in contiguous chunks of fixed size.
template <class F>
void parallel_for(std::int64_t count, F&& body) {
  constexpr std::int64_t kChunk = 1 << 14;
  std::int64_t nchunks = (count + kChunk - 1) / kChunk;
  ThreadPool::instance().run_chunks(nchunks, [&](std::int64_t c) {
    std::int64_t lo = c * kChunk;
    std::int64_t hi = lo + kChunk < count ? lo + kChunk : count;
    for (std::int64_t i = lo; i < hi; ++i) body(i);
  });
}

// Deterministic tree sum; depends only on the values in index order.
inline double pairwise_sum(const double* v, std::int64_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::int64_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

// Sum of body(i) over [0, count).  Partials are accumulated per fixed chunk
// and combined pairwise in chunk order, so the result does not depend on the
// worker count.
template <class F>
double parallel_sum(std::int64_t count, F&& body) {
  constexpr std::int64_t kChunk = 1 << 14;
  std::int64_t nchunks = (count + kChunk - 1) / kChunk;
  if (nchunks <= 0) return 0.0;
  std::vector<double> partial(static_cast<std::size_t>(nchunks), 0.0);
  ThreadPool::instance().run_chunks(nchunks, [&](std::int64_t c) {
    std::int64_t lo = c * kChunk;
    std::int64_t hi = lo + kChunk < count ? lo + kChunk : count;
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += body(i);
    partial[static_cast<std::size_t>(c)] = s;
  });
  return pairwise_sum(partial.data(), nchunks);
}

}  // namespace rigidem
