// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: run one simulation, run the SIP/H.323 comparison,
// query PPDU airtimes, or just validate a scenario file.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "vowlan/phy/airtime.hpp"
#include "vowlan/run/engine.hpp"
#include "vowlan/run/report.hpp"
#include "vowlan/run/scenario.hpp"
#include "vowlan/sim/rng.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFault = 1;
constexpr int kValidationError = 2;

vowlan::run::MetricsReport run_one(const vowlan::run::Scenario& sc, std::uint64_t seed) {
    vowlan::run::Engine engine(sc, seed);
    return engine.run();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vowlan - discrete-event simulator of VoIP (SIP vs H.323) over 802.11a"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::string signaling;
    std::uint64_t seed = 1;
    int rate_mbps = 54;
    std::int64_t bytes = 200;

    auto* run_cmd = app.add_subcommand("run", "simulate one scenario and write reports");
    run_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
    run_cmd->add_option("--seed", seed, "random seed");
    run_cmd->add_option("--signaling", signaling, "sip | h323 (overrides the scenario)")
        ->check(CLI::IsMember({"sip", "h323"}));
    run_cmd->add_option("--out", out_dir, "output directory");

    auto* cmp_cmd = app.add_subcommand(
        "compare", "run the scenario under SIP and under H.323, then diff the metrics");
    cmp_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
    cmp_cmd->add_option("--seed", seed, "random seed (per-mode seeds derive from it)");
    cmp_cmd->add_option("--out", out_dir, "output directory");

    auto* air_cmd = app.add_subcommand("airtime", "print the on-air duration of one PPDU");
    air_cmd->add_option("--rate", rate_mbps, "data rate in Mbit/s")->required();
    air_cmd->add_option("--bytes", bytes, "MPDU size in bytes")->required();

    auto* val_cmd = app.add_subcommand("validate", "parse and validate a scenario file");
    val_cmd->add_option("--scenario", scenario_path, "scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            vowlan::run::Scenario sc = vowlan::run::load_scenario_file(scenario_path);
            if (signaling == "sip")
                sc.signaling_mode = vowlan::voip::Protocol::Sip;
            else if (signaling == "h323")
                sc.signaling_mode = vowlan::voip::Protocol::H323;
            const auto report = run_one(sc, seed);
            vowlan::run::emit(report, out_dir);
            std::printf("run complete: %s mode, %zu voip flows, overall throughput %.0f bit/s\n",
                        vowlan::voip::protocol_name(report.mode), report.voip_flows.size(),
                        report.overall_throughput_bps);
            std::printf("reports written to %s\n", out_dir.c_str());
            return kOk;
        }

        if (cmp_cmd->parsed()) {
            vowlan::run::Scenario sc = vowlan::run::load_scenario_file(scenario_path);
            vowlan::Rng derive(seed);
            const std::uint64_t sip_seed = derive.next_u64();
            const std::uint64_t h323_seed = derive.next_u64();

            sc.signaling_mode = vowlan::voip::Protocol::Sip;
            const auto sip_report = run_one(sc, sip_seed);
            vowlan::run::emit(sip_report, std::string(out_dir) + "/sip");

            sc.signaling_mode = vowlan::voip::Protocol::H323;
            const auto h323_report = run_one(sc, h323_seed);
            vowlan::run::emit(h323_report, std::string(out_dir) + "/h323");

            const auto cmp = vowlan::run::compare(sip_report, h323_report);
            vowlan::run::emit_comparison(cmp, out_dir);
            std::printf("comparison written to %s (per-figure CSVs + comparison.csv)\n",
                        out_dir.c_str());
            std::printf("mean establishment: sip %.3f s vs h323 %.3f s\n",
                        sip_report.mean_init_established_s(),
                        h323_report.mean_init_established_s());
            return kOk;
        }

        if (air_cmd->parsed()) {
            const auto mode = vowlan::phy::mode_for_rate(rate_mbps);
            const auto t = vowlan::phy::ppdu_duration(bytes, mode);
            std::printf("%lld us (%lld B MPDU at %d Mbit/s: 20 us PLCP + %lld data symbols)\n",
                        static_cast<long long>(t.ticks), static_cast<long long>(bytes),
                        rate_mbps, static_cast<long long>((t.ticks - 20) / 4));
            return kOk;
        }

        if (val_cmd->parsed()) {
            const vowlan::run::Scenario sc = vowlan::run::load_scenario_file(scenario_path);
            std::printf("valid: %s (%zu nodes, %zu networks, %zu applications, %.1f s)\n",
                        sc.name.c_str(), sc.nodes.size(), sc.networks.size(), sc.apps.size(),
                        sc.duration.seconds());
            return kOk;
        }
    } catch (const vowlan::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kValidationError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fatal: %s\n", e.what());
        return kRuntimeFault;
    }
    return kOk;
}
