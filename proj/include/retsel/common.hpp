#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace retsel {

// Deterministic 64-bit generator (splitmix64). All randomness in the project
// flows through this so outputs are reproducible across platforms; the
// standard <random> distributions are implementation-defined and never used.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1), 53-bit resolution
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0,n)
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

[[noreturn]] inline void fail(const std::string& msg) { throw std::runtime_error(msg); }

[[noreturn]] inline void fail_at(const std::string& path, std::size_t line_no, const std::string& msg) {
    fail(path + ":" + std::to_string(line_no) + ": " + msg);
}

// Comment lines written by the tools start with "# " (or are a bare "#").
// Record ids may not contain whitespace, so no data line can look like this.
inline bool is_comment_line(std::string_view line) {
    return line == "#" || (line.size() >= 2 && line[0] == '#' && line[1] == ' ');
}

// split on a single delimiter, keeping empty fields
std::vector<std::string> split(std::string_view s, char delim);

// split on runs of blanks/tabs, dropping empty fields
std::vector<std::string> split_ws(std::string_view s);

// strict numeric parsing: the whole token must be consumed
bool parse_double(std::string_view tok, double& out);
bool parse_long(std::string_view tok, long long& out);

std::string format_fixed(double v, int digits = 6);

// Reads a text file line by line (LF endings, trailing CR stripped), skipping
// comment lines. Visitor receives (1-based line number, line).
template <typename Fn>
void for_each_data_line(const std::string& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || is_comment_line(line)) continue;
        fn(line_no, line);
    }
}

// Writes to <path>.tmp and renames into place on commit; a failed command
// never leaves a partial output behind.
class AtomicWriter {
  public:
    explicit AtomicWriter(std::string path);
    ~AtomicWriter();

    AtomicWriter(const AtomicWriter&) = delete;
    AtomicWriter& operator=(const AtomicWriter&) = delete;

    std::ofstream& stream() { return out_; }
    void write_header(const std::vector<std::string>& header_lines);
    void commit();

  private:
    std::string path_;
    std::string tmp_path_;
    std::ofstream out_;
    bool committed_ = false;
};

}  // namespace retsel
