#include "neardup/util.hpp"

#include <atomic>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>
#include <vector>

#include <unistd.h>

namespace neardup {

Ratio::Ratio(uint64_t n, uint64_t d) : num(n), den(d) {
  if (den == 0) throw ConfigError("ratio denominator must be positive");
  uint64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num == 0) den = 1;
}

namespace {

uint64_t parse_u64(std::string_view s, std::string_view what) {
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Ratio Ratio::parse(std::string_view text) {
  if (text.empty()) throw ConfigError("empty ratio");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    uint64_t n = parse_u64(text.substr(0, slash), "ratio numerator");
    uint64_t d = parse_u64(text.substr(slash + 1), "ratio denominator");
    return Ratio(n, d);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 9) {
      throw ConfigError("decimal ratio needs 1 to 9 fractional digits: '" + std::string(text) + "'");
    }
    uint64_t w = whole.empty() ? 0 : parse_u64(whole, "ratio");
    uint64_t f = parse_u64(frac, "ratio");
    uint64_t scale = 1;
    for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
    if (w > (UINT64_MAX - f) / scale) throw ConfigError("ratio out of range: '" + std::string(text) + "'");
    return Ratio(w * scale + f, scale);
  }
  return Ratio(parse_u64(text, "ratio"), 1);
}

std::string Ratio::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

uint64_t bounded_random(std::mt19937_64& rng, uint64_t bound) {
  if (bound == 0) throw ConfigError("bounded_random: bound must be positive");
  // largest multiple of bound that fits in 64 bits; draws past it are retried
  uint64_t rem = (0 - bound) % bound;
  uint64_t limit = 0 - rem;
  for (;;) {
    uint64_t x = rng();
    if (x < limit || rem == 0) return x % bound;
  }
}

void run_workers(unsigned workers, const std::function<void(unsigned)>& fn) {
  if (workers == 0) throw ConfigError("worker count must be positive");
  if (workers == 1) {
    fn(0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::mutex mu;
  std::exception_ptr first_error;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        fn(w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void parallel_for_index(uint64_t count, unsigned workers,
                        const std::function<void(uint64_t)>& fn) {
  if (count == 0) return;
  unsigned use = workers;
  if (use > count) use = static_cast<unsigned>(count);
  if (use <= 1) {
    for (uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<uint64_t> next{0};
  run_workers(use, [&](unsigned) {
    for (;;) {
      uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      fn(i);
    }
  });
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "': " + std::strerror(errno));
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path + "'");
  return bytes;
}

void write_file_bytes(const std::string& path, std::string_view bytes, bool fsync_file) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot create '" + path + "': " + std::strerror(errno));
  bool ok = bytes.empty() || std::fwrite(bytes.data(), 1, bytes.size(), f) == bytes.size();
  if (ok && std::fflush(f) != 0) ok = false;
  if (ok && fsync_file && fsync(fileno(f)) != 0) ok = false;
  if (std::fclose(f) != 0) ok = false;
  if (!ok) throw IoError("write failed for '" + path + "'");
}

}  // namespace neardup
