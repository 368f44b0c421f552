#include "retsel/common.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>

namespace retsel {

std::vector<std::string> split(std::string_view s, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(delim, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            return out;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

bool parse_double(std::string_view tok, double& out) {
    if (tok.empty()) return false;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_long(std::string_view tok, long long& out) {
    if (tok.empty()) return false;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

AtomicWriter::AtomicWriter(std::string path) : path_(std::move(path)), tmp_path_(path_ + ".tmp") {
    out_.open(tmp_path_, std::ios::binary | std::ios::trunc);
    if (!out_) fail("cannot open " + tmp_path_ + " for writing");
}

AtomicWriter::~AtomicWriter() {
    if (!committed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_path_, ec);
    }
}

void AtomicWriter::write_header(const std::vector<std::string>& header_lines) {
    for (const auto& h : header_lines) out_ << "# " << h << "\n";
}

void AtomicWriter::commit() {
    out_.flush();
    if (!out_) fail("write failed for " + tmp_path_);
    out_.close();
    std::error_code ec;
    std::filesystem::rename(tmp_path_, path_, ec);
    if (ec) fail("cannot rename " + tmp_path_ + " to " + path_ + ": " + ec.message());
    committed_ = true;
}

}  // namespace retsel
