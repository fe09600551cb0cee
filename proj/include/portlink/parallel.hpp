// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace portlink
{
    // Runs fn(i) for i in [0, n) on up to `threads` workers with a fixed strided
    // assignment. The first exception from any worker is rethrown after all join.
    template <class Fn>
    void parallel_for(std::size_t n, unsigned threads, Fn &&fn)
    {
        threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
        if (threads == 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }
        std::vector<std::exception_ptr> errors(threads);
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < threads; ++w)
                pool.emplace_back([&, w]
                                  {
                                      try
                                      {
                                          for (std::size_t i = w; i < n; i += threads)
                                              fn(i);
                                      }
                                      catch (...)
                                      {
                                          errors[w] = std::current_exception();
                                      } });
        }
        for (auto &e : errors)
            if (e)
                std::rethrow_exception(e);
    }
}
