#pragma once

#include <algorithm>

namespace csbp::stats {

template <class R>
std::vector<R> run_chunks(std::size_t n, std::size_t chunks, int jobs, const RandomStream& root,
                          const std::function<R(std::size_t, RandomStream&, std::size_t, std::size_t)>& fn) {
  chunks = std::max<std::size_t>(1, std::min(chunks, std::max<std::size_t>(n, 1)));
  std::vector<R> out(chunks);
  parallel_for(chunks, jobs, [&](std::size_t c) {
    std::size_t b = n * c / chunks;
    std::size_t e = n * (c + 1) / chunks;
    RandomStream s = root.split(c);
    out[c] = fn(c, s, b, e);
  });
  return out;
}

}  // namespace csbp::stats
