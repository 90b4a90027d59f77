#include "winter/io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

#include "winter/errors.hpp"

namespace winter {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_number(std::string_view tok) {
  const std::string_view original = tok;
  double scale = 1.0;
  if (tok == "pi") return std::numbers::pi;
  if (tok.size() > 3 && tok.substr(tok.size() - 3) == "*pi") {
    scale = std::numbers::pi;
    tok.remove_suffix(3);
  }
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw DomainError("grid spec: cannot parse value '" + std::string(original) + "'");
  return v * scale;
}

int parse_count(std::string_view tok) {
  int n = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), n);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || n < 1)
    throw DomainError("grid spec: count must be a positive integer, got '" + std::string(tok) + "'");
  return n;
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec) {
  if (spec.empty()) throw DomainError("grid spec is empty");
  std::vector<double> grid;
  const auto fields = split(spec, ':');
  if (fields.size() == 1) {
    for (std::string_view tok : split(spec, ',')) grid.push_back(parse_number(tok));
  } else if (fields.size() == 3 || (fields.size() == 4 && fields[0] == "logspace")) {
    const bool log = fields.size() == 4;
    const double a = parse_number(fields[log ? 1 : 0]);
    const double b = parse_number(fields[log ? 2 : 1]);
    const int n = parse_count(fields[log ? 3 : 2]);
    if (log && !(a > 0.0 && b > 0.0)) throw DomainError("grid spec: logspace endpoints must be positive");
    if (n == 1) {
      grid.push_back(a);
    } else {
      for (int i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / (n - 1);
        grid.push_back(log ? a * std::pow(b / a, f) : a + (b - a) * f);
      }
      grid.back() = b;
    }
  } else {
    throw DomainError("grid spec must be 'v', 'v1,v2,...', 'start:stop:count' or 'logspace:start:stop:count'");
  }
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("grid spec must produce strictly increasing values");
  return grid;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::Domain, "cannot open " + tmp.string() + " for writing");
    os << content;
    os.flush();
    if (!os) throw Error(ErrorKind::Domain, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

int worker_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("WINTER_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace winter
