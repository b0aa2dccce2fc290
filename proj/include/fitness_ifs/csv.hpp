#pragma once

// CSV emission with byte-stable numeric formatting: doubles are written in
// their shortest round-trip form via std::to_chars, so identical inputs
// always produce identical files.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fitness_ifs {

inline std::string format_double(double value) {
    char buf[40];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    if (result.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, result.ptr);
}

/// One output record as ordered (column, value) text pairs; shared by the
/// CSV writer and the JSON mirror.
class Record {
public:
    Record& add(std::string_view column, double value) {
        columns_.emplace_back(column);
        values_.push_back(format_double(value));
        numeric_.push_back(true);
        return *this;
    }

    Record& add(std::string_view column, long long value) {
        columns_.emplace_back(column);
        values_.push_back(std::to_string(value));
        numeric_.push_back(true);
        return *this;
    }

    Record& add(std::string_view column, std::string_view value) {
        columns_.emplace_back(column);
        values_.emplace_back(value);
        numeric_.push_back(false);
        return *this;
    }

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::string>& values() const { return values_; }
    bool is_numeric(std::size_t i) const { return numeric_[i]; }

private:
    std::vector<std::string> columns_;
    std::vector<std::string> values_;
    std::vector<bool> numeric_;
};

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    }

    void write(const Record& record) {
        if (!header_written_) {
            write_joined(record.columns());
            header_written_ = true;
        }
        write_joined(record.values());
    }

    void flush() { out_.flush(); }

private:
    void write_joined(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
    bool header_written_ = false;
};

}  // namespace fitness_ifs
