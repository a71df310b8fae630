// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_SIM_TIME_HPP
#define VOWLAN_SIM_TIME_HPP

#include <cstdint>
#include <compare>

namespace vowlan {

// Simulation clock value. 1 tick = 1 microsecond, which makes every 802.11a
// timing constant (9 us slot, 16 us SIFS, 4 us OFDM symbol) integral, so all
// timing arithmetic is exact.
struct SimTime {
    std::int64_t ticks = 0;

    constexpr SimTime() = default;
    constexpr explicit SimTime(std::int64_t t) : ticks(t) {}

    static constexpr SimTime us(std::int64_t v) { return SimTime{v}; }
    static constexpr SimTime ms(std::int64_t v) { return SimTime{v * 1000}; }
    static constexpr SimTime s(std::int64_t v) { return SimTime{v * 1000000}; }
    static constexpr SimTime from_seconds(double v) {
        return SimTime{static_cast<std::int64_t>(v * 1e6 + (v >= 0 ? 0.5 : -0.5))};
    }

    constexpr double seconds() const { return static_cast<double>(ticks) / 1e6; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime{ticks + o.ticks}; }
    constexpr SimTime operator-(SimTime o) const { return SimTime{ticks - o.ticks}; }
    constexpr SimTime operator*(std::int64_t k) const { return SimTime{ticks * k}; }
    constexpr SimTime& operator+=(SimTime o) { ticks += o.ticks; return *this; }
    constexpr SimTime& operator-=(SimTime o) { ticks -= o.ticks; return *this; }
};

constexpr SimTime operator*(std::int64_t k, SimTime t) { return SimTime{k * t.ticks}; }

namespace literals {
constexpr SimTime operator""_us(unsigned long long v) { return SimTime::us(static_cast<std::int64_t>(v)); }
constexpr SimTime operator""_ms(unsigned long long v) { return SimTime::ms(static_cast<std::int64_t>(v)); }
constexpr SimTime operator""_s(unsigned long long v) { return SimTime::s(static_cast<std::int64_t>(v)); }
} // namespace literals

} // namespace vowlan

#endif
