// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_MAC_PCF_HPP
#define VOWLAN_MAC_PCF_HPP

#include <utility>
#include <vector>

#include "vowlan/mac/frame.hpp"
#include "vowlan/sim/error.hpp"
#include "vowlan/sim/time.hpp"

namespace vowlan::mac {

// Contention-free period schedule. The point coordinator polls stations in
// round-robin order; the cursor survives CFP boundaries, so a contention-free
// period cut short resumes the list at the very next station in the next one.
struct PcfSchedule {
    SimTime superframe_period{};
    SimTime cfp_duration{};
    std::vector<NodeId> polling_list;
    std::size_t cursor = 0;

    void validate() const {
        if (polling_list.empty())
            throw ConfigError("pcf: polling list is empty");
        if (!(cfp_duration < superframe_period))
            throw ConfigError("pcf: cfp_duration must be shorter than the superframe");
        if (cursor >= polling_list.size())
            throw ConfigError("pcf: cursor out of range");
    }
};

// Next station to poll; advances the cursor modulo the list length.
inline std::pair<NodeId, PcfSchedule> pcf_poll_next(PcfSchedule s) {
    if (s.polling_list.empty())
        throw ConfigError("pcf_poll_next: polling list is empty");
    const NodeId station = s.polling_list[s.cursor];
    s.cursor = (s.cursor + 1) % s.polling_list.size();
    return {station, std::move(s)};
}

} // namespace vowlan::mac

#endif
