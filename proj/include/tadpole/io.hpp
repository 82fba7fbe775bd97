// io.hpp — deterministic artifact writing: CSV with '#' header metadata and
// a small worker pool for omega sweeps. Numbers are printed with 15
// significant digits so identical configurations produce byte-identical
// files.

#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "tadpole/errors.hpp"

namespace tadpole {

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

// FNV-1a of the canonical config string; stable across runs and platforms.
inline std::string fnv1a_hex(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header_meta,
              const std::vector<std::string>& columns) {
        std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
        out_.open(path);
        if (!out_) throw Error("CsvWriter: cannot open " + path.string());
        for (const std::string& m : header_meta) out_ << "# " << m << "\n";
        for (size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }

  private:
    std::ofstream out_;
};

// Runs body(0..n-1) on up to `workers` threads; results must be collected by
// index by the caller, which keeps output deterministic.
inline void parallel_for(int n, int workers, const std::function<void(int)>& body) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (std::thread& th : pool) th.join();
}

}  // namespace tadpole
