// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#include "portlink/touchstone.hpp"
#include "portlink/error.hpp"
#include "portlink/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace portlink::touchstone
{
    namespace
    {
        // Magnitudes at or below this dB level are read as exact zeros; the writer
        // emits it for zero entries, which have no finite dB value.
        constexpr double db_floor = -3000.0;

        constexpr double deg = std::numbers::pi / 180.0;

        struct Options
        {
            double unit_scale = 1e9; // GHz is the format default
            DataFormat format = DataFormat::MA;
            double reference_impedance = 50.0;
        };

        struct Record
        {
            std::size_t line;
            std::vector<double> values;
        };

        std::string upper(std::string_view s)
        {
            std::string out(s);
            std::transform(out.begin(), out.end(), out.begin(),
                           [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
            return out;
        }

        std::vector<std::string_view> split_ws(std::string_view s)
        {
            std::vector<std::string_view> tokens;
            std::size_t i = 0;
            while (i < s.size())
            {
                while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
                    ++i;
                std::size_t j = i;
                while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])))
                    ++j;
                if (j > i)
                    tokens.push_back(s.substr(i, j - i));
                i = j;
            }
            return tokens;
        }

        std::optional<double> to_double(std::string_view token)
        {
            // from_chars does not accept a leading '+'
            if (!token.empty() && token.front() == '+')
                token.remove_prefix(1);
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
            if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value))
                return std::nullopt;
            return value;
        }

        Options parse_option_line(std::string_view body, std::size_t line)
        {
            Options opt;
            auto tokens = split_ws(body);
            for (std::size_t k = 0; k < tokens.size(); ++k)
            {
                const std::string t = upper(tokens[k]);
                if (t == "HZ")
                    opt.unit_scale = 1.0;
                else if (t == "KHZ")
                    opt.unit_scale = 1e3;
                else if (t == "MHZ")
                    opt.unit_scale = 1e6;
                else if (t == "GHZ")
                    opt.unit_scale = 1e9;
                else if (t == "S")
                    ;
                else if (t == "Y" || t == "Z" || t == "H" || t == "G")
                    throw TouchstoneError("unsupported parameter type '" + t + "' (only S-parameters are supported)", line);
                else if (t == "RI")
                    opt.format = DataFormat::RI;
                else if (t == "MA")
                    opt.format = DataFormat::MA;
                else if (t == "DB")
                    opt.format = DataFormat::DB;
                else if (t == "R")
                {
                    if (k + 1 >= tokens.size())
                        throw TouchstoneError("malformed option line: 'R' without reference impedance", line);
                    auto z0 = to_double(tokens[++k]);
                    if (!z0)
                        throw TouchstoneError("malformed option line: bad reference impedance '" + std::string(tokens[k]) + "'", line);
                    if (*z0 <= 0.0)
                        throw TouchstoneError("malformed option line: reference impedance must be positive", line);
                    opt.reference_impedance = *z0;
                }
                else
                    throw TouchstoneError("malformed option line: unknown token '" + std::string(tokens[k]) + "'", line);
            }
            return opt;
        }

        cdouble decode_pair(double a, double b, DataFormat format)
        {
            switch (format)
            {
            case DataFormat::RI:
                return {a, b};
            case DataFormat::MA:
                return std::polar(1.0, b * deg) * a;
            case DataFormat::DB:
                if (a <= db_floor)
                    return {0.0, 0.0};
                return std::polar(std::pow(10.0, a / 20.0), b * deg);
            }
            return {};
        }

        // Index of the k-th value pair in the matrix. Two-port files are column-major
        // (S11 S21 S12 S22), everything else row-major.
        std::pair<Eigen::Index, Eigen::Index> pair_position(std::size_t k, std::size_t n)
        {
            const auto row = static_cast<Eigen::Index>(k / n);
            const auto col = static_cast<Eigen::Index>(k % n);
            if (n == 2)
                return {col, row};
            return {row, col};
        }

        double unit_scale(FrequencyUnit unit)
        {
            switch (unit)
            {
            case FrequencyUnit::Hz:
                return 1.0;
            case FrequencyUnit::kHz:
                return 1e3;
            case FrequencyUnit::MHz:
                return 1e6;
            case FrequencyUnit::GHz:
                return 1e9;
            }
            return 1.0;
        }

        const char *unit_name(FrequencyUnit unit)
        {
            switch (unit)
            {
            case FrequencyUnit::Hz:
                return "Hz";
            case FrequencyUnit::kHz:
                return "kHz";
            case FrequencyUnit::MHz:
                return "MHz";
            case FrequencyUnit::GHz:
                return "GHz";
            }
            return "Hz";
        }

        std::size_t perfect_square_root(std::size_t v)
        {
            auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v))));
            return r * r == v ? r : 0;
        }
    }

    TouchstoneNetwork::TouchstoneNetwork(std::size_t n_ports, double reference_impedance,
                                         std::vector<NetworkPoint> points,
                                         std::optional<std::string> source_comment)
        : n_ports_(n_ports), reference_impedance_(reference_impedance), points_(std::move(points)),
          source_comment_(std::move(source_comment))
    {
        if (n_ports_ == 0)
            throw TouchstoneError("network must have at least one port");
        if (!(reference_impedance_ > 0.0) || !std::isfinite(reference_impedance_))
            throw TouchstoneError("reference impedance must be positive");
        if (points_.empty())
            throw TouchstoneError("network has no frequency points");
        for (std::size_t i = 0; i < points_.size(); ++i)
        {
            if (points_[i].matrix.dim() != n_ports_)
                throw TouchstoneError("frequency point " + std::to_string(i) + " has a " +
                                      std::to_string(points_[i].matrix.dim()) + "-port matrix, expected " +
                                      std::to_string(n_ports_));
            if (!std::isfinite(points_[i].frequency_hz) || points_[i].frequency_hz < 0.0)
                throw TouchstoneError("invalid frequency at point " + std::to_string(i));
            if (i > 0 && !(points_[i].frequency_hz > points_[i - 1].frequency_hz))
                throw TouchstoneError("frequencies are not strictly increasing at point " + std::to_string(i));
        }
    }

    TouchstoneNetwork parse_touchstone(std::string_view text, std::optional<std::size_t> declared_ports,
                                       std::vector<std::string> *warnings)
    {
        if (declared_ports && *declared_ports == 0)
            throw TouchstoneError("declared port count must be positive");

        Options opt;
        bool have_options = false;
        std::vector<Record> records;
        std::string comments;
        bool have_comments = false;

        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size())
        {
            std::size_t eol = text.find('\n', pos);
            if (eol == std::string_view::npos)
                eol = text.size();
            std::string_view line = text.substr(pos, eol - pos);
            pos = eol + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r')
                line.remove_suffix(1);

            if (auto bang = line.find('!'); bang != std::string_view::npos)
            {
                if (have_comments)
                    comments += '\n';
                comments += line.substr(bang + 1);
                have_comments = true;
                line = line.substr(0, bang);
            }

            auto tokens = split_ws(line);
            if (tokens.empty())
                continue;

            if (tokens.front().front() == '[')
                throw TouchstoneError("Touchstone v2 keyword " + std::string(tokens.front()) +
                                          " is not supported (v1 files only)",
                                      line_no);

            if (tokens.front().front() == '#')
            {
                if (have_options)
                {
                    if (warnings)
                        warnings->push_back("line " + std::to_string(line_no) + ": repeated option line ignored");
                    continue;
                }
                if (!records.empty())
                    throw TouchstoneError("malformed option line: option line must precede the data", line_no);
                const auto hash = line.find('#');
                opt = parse_option_line(line.substr(hash + 1), line_no);
                have_options = true;
                continue;
            }

            std::vector<double> values;
            values.reserve(tokens.size());
            for (auto tok : tokens)
            {
                auto v = to_double(tok);
                if (!v)
                    throw TouchstoneError("non-numeric data token '" + std::string(tok) + "'", line_no);
                values.push_back(*v);
            }

            // A record starts with a line holding the frequency plus whole value
            // pairs (odd count); continuation lines carry whole pairs (even count).
            if (values.size() % 2 == 1)
                records.push_back(Record{line_no, std::move(values)});
            else if (records.empty())
                throw TouchstoneError("inconsistent column count: data record does not start with a frequency", line_no);
            else
                records.back().values.insert(records.back().values.end(), values.begin(), values.end());
        }

        if (records.empty())
            throw TouchstoneError("no data records found");

        std::size_t n = 0;
        if (declared_ports)
            n = *declared_ports;
        else
        {
            n = perfect_square_root((records.front().values.size() - 1) / 2);
            if (n == 0)
                throw TouchstoneError("inconsistent column count: cannot infer port count from " +
                                          std::to_string(records.front().values.size()) + " values",
                                      records.front().line);
        }
        const std::size_t expected = 1 + 2 * n * n;

        std::vector<NetworkPoint> points;
        bool noise_block = false;
        for (const auto &rec : records)
        {
            const double f = rec.values.front() * opt.unit_scale;
            if (noise_block)
            {
                if (rec.values.size() != 5)
                    throw TouchstoneError("inconsistent column count in noise-parameter block: expected 5 values, got " +
                                              std::to_string(rec.values.size()),
                                          rec.line);
                continue;
            }
            if (n == 2 && rec.values.size() == 5 && !points.empty() && f <= points.back().frequency_hz)
            {
                noise_block = true;
                if (warnings)
                    warnings->push_back("line " + std::to_string(rec.line) + ": noise-parameter block skipped");
                continue;
            }
            if (rec.values.size() != expected)
                throw TouchstoneError("inconsistent column count: expected " + std::to_string(expected) +
                                          " values for a " + std::to_string(n) + "-port record, got " +
                                          std::to_string(rec.values.size()),
                                      rec.line);
            if (f < 0.0)
                throw TouchstoneError("negative frequency", rec.line);
            if (!points.empty() && !(f > points.back().frequency_hz))
                throw TouchstoneError("non-monotonic frequency", rec.line);

            const auto dim = static_cast<Eigen::Index>(n);
            CMatrix s(dim, dim);
            for (std::size_t k = 0; k < n * n; ++k)
            {
                auto [r, c] = pair_position(k, n);
                s(r, c) = decode_pair(rec.values[1 + 2 * k], rec.values[2 + 2 * k], opt.format);
            }
            if (!all_finite(s))
                throw TouchstoneError("non-finite S-parameter value", rec.line);
            points.push_back(NetworkPoint{f, ScatteringMatrix(std::move(s))});
        }

        std::optional<std::string> comment;
        if (have_comments)
            comment = std::move(comments);
        return TouchstoneNetwork(n, opt.reference_impedance, std::move(points), std::move(comment));
    }

    std::optional<std::size_t> ports_from_extension(std::string_view path)
    {
        auto dot = path.rfind('.');
        if (dot == std::string_view::npos)
            return std::nullopt;
        const std::string ext = upper(path.substr(dot + 1));
        if (ext.size() < 3 || ext.front() != 'S' || ext.back() != 'P')
            return std::nullopt;
        std::size_t n = 0;
        for (std::size_t i = 1; i + 1 < ext.size(); ++i)
        {
            if (!std::isdigit(static_cast<unsigned char>(ext[i])))
                return std::nullopt;
            n = n * 10 + static_cast<std::size_t>(ext[i] - '0');
        }
        if (n == 0)
            return std::nullopt;
        return n;
    }

    TouchstoneNetwork load_touchstone(const std::string &path, std::vector<std::string> *warnings)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw TouchstoneError("cannot open '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        try
        {
            return parse_touchstone(buf.str(), ports_from_extension(path), warnings);
        }
        catch (const TouchstoneError &e)
        {
            throw TouchstoneError(path + ": " + std::string(e.what()).substr(std::string("touchstone: ").size()));
        }
    }

    std::string serialize_touchstone(const TouchstoneNetwork &net, DataFormat format, FrequencyUnit unit)
    {
        std::string out;
        if (net.source_comment())
        {
            std::string_view c = *net.source_comment();
            std::size_t pos = 0;
            while (true)
            {
                auto eol = c.find('\n', pos);
                out += '!';
                out += c.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
                out += '\n';
                if (eol == std::string_view::npos)
                    break;
                pos = eol + 1;
            }
        }
        out += "# ";
        out += unit_name(unit);
        out += " S ";
        out += to_string(format);
        out += " R ";
        out += format_number(net.reference_impedance());
        out += '\n';

        const std::size_t n = net.n_ports();
        const double scale = unit_scale(unit);
        auto append_pair = [&](cdouble z)
        {
            double a = 0.0, b = 0.0;
            switch (format)
            {
            case DataFormat::RI:
                a = z.real();
                b = z.imag();
                break;
            case DataFormat::MA:
                a = std::abs(z);
                b = a > 0.0 ? std::arg(z) / deg : 0.0;
                break;
            case DataFormat::DB:
            {
                const double mag = std::abs(z);
                a = mag > 0.0 ? std::max(20.0 * std::log10(mag), db_floor) : db_floor;
                b = mag > 0.0 ? std::arg(z) / deg : 0.0;
                break;
            }
            }
            out += ' ';
            out += format_number(a);
            out += ' ';
            out += format_number(b);
        };

        for (const auto &pt : net.points())
        {
            out += format_number(pt.frequency_hz / scale);
            if (n <= 2)
            {
                for (std::size_t k = 0; k < n * n; ++k)
                {
                    auto [r, c] = pair_position(k, n);
                    append_pair(pt.matrix.entries()(r, c));
                }
                out += '\n';
                continue;
            }
            // Larger networks: one matrix row per line group, four pairs per line.
            for (std::size_t r = 0; r < n; ++r)
            {
                if (r > 0)
                    out += ' ';
                for (std::size_t c = 0; c < n; ++c)
                {
                    if (c > 0 && c % 4 == 0)
                        out += "\n ";
                    append_pair(pt.matrix.entries()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
                }
                out += '\n';
            }
        }
        return out;
    }

    std::string to_string(DataFormat format)
    {
        switch (format)
        {
        case DataFormat::RI:
            return "RI";
        case DataFormat::MA:
            return "MA";
        case DataFormat::DB:
            return "DB";
        }
        return "RI";
    }

    DataFormat data_format_from_string(std::string_view name)
    {
        const std::string u = upper(name);
        if (u == "RI")
            return DataFormat::RI;
        if (u == "MA")
            return DataFormat::MA;
        if (u == "DB")
            return DataFormat::DB;
        throw TouchstoneError("unknown data format '" + std::string(name) + "'");
    }
}
