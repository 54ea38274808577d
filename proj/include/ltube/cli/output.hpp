//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/cli/output.hpp
//! CSV files with round-trip floats, SHA-256 digests, run manifests.
//---------------------------------------------------------------------------//
#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "../errors.hpp"

namespace ltube::cli
{
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

//---------------------------------------------------------------------------//
//! 17 significant digits: reads back to the same 64-bit value
inline std::string format_double(double x)
{
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", x);
    return buf.data();
}

/*!
 * CSV writer. The header row is written on construction; each row must
 * have one cell per column.
 */
class CsvWriter
{
  public:
    using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

    CsvWriter(fs::path path, std::vector<std::string> const& columns)
        : path_{std::move(path)}, out_{path_, std::ios::binary}, n_{columns.size()}
    {
        if (!out_)
            throw Error("cannot write '" + path_.string() + "'");
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
    }

    void row(std::initializer_list<Cell> cells) { row(std::vector<Cell>(cells)); }

    void row(std::vector<Cell> const& cells)
    {
        expect(cells.size() == n_, "CsvWriter: wrong number of cells");
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            if (i)
                out_ << ',';
            std::visit(
                [this](auto const& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>)
                        out_ << format_double(v);
                    else
                        out_ << v;
                },
                cells[i]);
        }
        out_ << '\n';
    }

    fs::path const& path() const { return path_; }

    void close() { out_.close(); }

  private:
    fs::path path_;
    std::ofstream out_;
    std::size_t n_;
};

//---------------------------------------------------------------------------//
//! Hex SHA-256 of a file's bytes
inline std::string sha256_file(fs::path const& path)
{
    std::ifstream in{path, std::ios::binary};
    if (!in)
        throw Error("cannot read '" + path.string() + "'");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf;
    while (in)
    {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    EVP_MD_CTX_free(ctx);
    static char const hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i)
    {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

//! Hex SHA-256 of a string
inline std::string sha256_text(std::string const& text)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr);
    static char const hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i)
    {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

//---------------------------------------------------------------------------//
inline void write_json(fs::path const& path, Json const& j)
{
    fs::path const tmp = path.string() + ".tmp";
    {
        std::ofstream out{tmp, std::ios::binary};
        if (!out)
            throw Error("cannot write '" + tmp.string() + "'");
        out << j.dump(2) << '\n';
    }
    fs::rename(tmp, path);
}

inline Json read_json(fs::path const& path)
{
    std::ifstream in{path};
    if (!in)
        throw Error("cannot read '" + path.string() + "'");
    return Json::parse(in);
}

//---------------------------------------------------------------------------//
}  // namespace ltube::cli
