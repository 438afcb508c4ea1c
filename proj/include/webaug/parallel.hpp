#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace webaug {

// Deterministic fork/join map: the input is split into fixed chunks, workers
// pull chunk indices from an atomic counter, and results are concatenated in
// chunk order. Output is identical for any thread count.
template <typename In, typename Out, typename Fn>
std::vector<Out> parallel_map_chunks(const std::vector<In> &input, int threads,
                                     size_t chunk_size, Fn fn) {
  if (chunk_size == 0)
    chunk_size = 1024;
  const size_t n_chunks = (input.size() + chunk_size - 1) / chunk_size;
  std::vector<std::vector<Out>> per_chunk(n_chunks);

  auto run_chunk = [&](size_t c) {
    const size_t begin = c * chunk_size;
    const size_t end = std::min(begin + chunk_size, input.size());
    std::vector<Out> out;
    for (size_t i = begin; i < end; ++i)
      fn(input[i], out);
    per_chunk[c] = std::move(out);
  };

  if (threads <= 1 || n_chunks <= 1) {
    for (size_t c = 0; c < n_chunks; ++c)
      run_chunk(c);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (;;) {
        size_t c = next.fetch_add(1);
        if (c >= n_chunks)
          return;
        run_chunk(c);
      }
    };
    std::vector<std::thread> pool;
    const int n_workers = std::min<int>(threads, static_cast<int>(n_chunks));
    pool.reserve(static_cast<size_t>(n_workers));
    for (int t = 0; t < n_workers; ++t)
      pool.emplace_back(worker);
    for (auto &t : pool)
      t.join();
  }

  std::vector<Out> result;
  size_t total = 0;
  for (const auto &v : per_chunk)
    total += v.size();
  result.reserve(total);
  for (auto &v : per_chunk)
    result.insert(result.end(), std::make_move_iterator(v.begin()),
                  std::make_move_iterator(v.end()));
  return result;
}

} // namespace webaug
