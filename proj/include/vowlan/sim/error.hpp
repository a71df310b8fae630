// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_SIM_ERROR_HPP
#define VOWLAN_SIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace vowlan {

// Contract violation by calling code (scheduling in the past, bad interval
// bounds, illegal state-machine input). Indicates a bug, not bad user input.
class MisuseError : public std::logic_error {
public:
    explicit MisuseError(const std::string& what) : std::logic_error(what) {}
};

// Invalid scenario/configuration input. Reported with enough context to fix
// the offending file or setting.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace vowlan

#endif
