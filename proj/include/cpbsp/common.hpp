// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CPBSP_COMMON_HPP
#define CPBSP_COMMON_HPP

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cpbsp {

// ----------------------------------------------------------------------------
// Error taxonomy
// ----------------------------------------------------------------------------

/// Base class for all library errors. Callers that only need a coarse
/// success/data-error split can catch this type alone.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoFrames : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct DecodeError : Error {
    using Error::Error;
};
struct WriteError : Error {
    using Error::Error;
};
struct GeometryError : Error {
    using Error::Error;
};
struct InsufficientTraining : Error {
    using Error::Error;
};
struct ParamError : Error {
    using Error::Error;
};
struct BoundsError : Error {
    using Error::Error;
};
struct ModeError : Error {
    using Error::Error;
};
struct SpecError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

// ----------------------------------------------------------------------------
// Small shared types
// ----------------------------------------------------------------------------

struct Point {
    int x = 0;
    int y = 0;
};

inline bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }

namespace detail {

// ----------------------------------------------------------------------------
// Deterministic data-parallel loop
// ----------------------------------------------------------------------------

inline int thread_count() {
    if (const char* env = std::getenv("CPBSP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs fn(i) for every i in [begin, end). Work items are claimed from a
/// shared counter; output stays deterministic as long as distinct indices
/// touch distinct state. The first exception thrown by any worker is
/// rethrown on the calling thread.
template <typename Fn>
void parallel_for(int begin, int end, Fn&& fn) {
    const int n = end - begin;
    if (n <= 0) return;
    const int workers = std::min(thread_count(), n);
    if (workers <= 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }

    std::atomic<int> next{begin};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto body = [&] {
        for (;;) {
            const int i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= end) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ----------------------------------------------------------------------------
// Little-endian scalar IO (model files are byte-order independent)
// ----------------------------------------------------------------------------

template <typename T>
void put_le(std::string& out, T value) {
    static_assert(std::is_unsigned_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xffu));
    }
}

template <typename T>
T get_le(const unsigned char* p) {
    static_assert(std::is_unsigned_v<T>);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value |= static_cast<T>(p[i]) << (8 * i);
    }
    return value;
}

}  // namespace detail
}  // namespace cpbsp

#endif  // CPBSP_COMMON_HPP
