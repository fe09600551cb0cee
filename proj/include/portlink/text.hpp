// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace portlink
{
    // Shortest of 15..17 significant digits that parses back to the identical
    // double. Used by every text writer so that saved artifacts round-trip.
    std::string format_number(double value);

    // 64-bit FNV-1a.
    std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

    std::string to_hex(std::uint64_t value);
}
