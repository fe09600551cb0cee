// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#include "portlink/text.hpp"

#include <cstdio>
#include <cstdlib>

namespace portlink
{
    std::string format_number(double value)
    {
        char buf[64];
        for (int precision = 15; precision <= 17; ++precision)
        {
            std::snprintf(buf, sizeof buf, "%.*g", precision, value);
            if (std::strtod(buf, nullptr) == value)
                break;
        }
        return buf;
    }

    std::uint64_t fnv1a(std::string_view data, std::uint64_t seed)
    {
        std::uint64_t h = seed;
        for (unsigned char c : data)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::string to_hex(std::uint64_t value)
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
        return buf;
    }
}
