// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "smartmeter/core/errors.hpp"
#include "smartmeter/core/protocol.hpp"
#include "smartmeter/ingest/errors.hpp"

using namespace smartmeter;
using namespace smartmeter::cli;

namespace {

void add_query_flags(CLI::App* cmd, QueryOptions& q) {
    cmd->add_option("--server", q.server, "HTTP API host:port")->capture_default_str();
    cmd->add_option("--device", q.device, "chip ID")->required();
    cmd->add_option("--from", q.from, "first day, YYYY-MM-DD");
    cmd->add_option("--to", q.to, "last day, YYYY-MM-DD");
    cmd->add_option("--out", q.out, "output file (default stdout)");
    cmd->add_option("--token", q.token, "API token (default $SMARTMETER_TOKEN)");
    cmd->add_option("--user", q.user, "log in with this user instead of a token");
    cmd->add_option("--password", q.password);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smart energy-meter platform: service, simulator and billing tools"};
    app.require_subcommand(1);

    ServeOptions serve_opts;
    auto* serve_cmd = app.add_subcommand("serve", "run the ingest service until SIGINT/SIGTERM");
    serve_cmd->add_option("--config", serve_opts.config, "service config JSON")->check(CLI::ExistingFile);
    serve_cmd->add_option("--bind", serve_opts.bind);
    serve_cmd->add_option("--device-port", serve_opts.device_port, "0 picks a free port")
        ->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--http-port", serve_opts.http_port, "0 picks a free port")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--ledger", serve_opts.ledger);
    serve_cmd->add_option("--snapshot", serve_opts.snapshot);

    SimulateOptions sim_opts;
    auto* sim_cmd = app.add_subcommand("simulate", "drive a simulated fleet against the service");
    sim_cmd->add_option("--fleet", sim_opts.fleet, "fleet definition JSON")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--days", sim_opts.days, "simulated days")->capture_default_str();
    sim_cmd->add_option("--accel", sim_opts.accel, "simulated seconds per wall second, 0 = unpaced")
        ->capture_default_str();
    sim_cmd->add_option("--faults", sim_opts.faults, "fault script JSON")->check(CLI::ExistingFile);
    auto* server_opt = sim_cmd->add_option("--server", sim_opts.server, "device server host:port")
                           ->capture_default_str();
    sim_cmd->add_flag("--offline", sim_opts.offline, "run against an in-process scratch service")
        ->excludes(server_opt);

    BillOptions bill_opts;
    auto* bill_cmd = app.add_subcommand("bill", "print a bill breakdown");
    auto* units_opt = bill_cmd->add_option("--units", bill_opts.units, "consumption in kWh");
    bill_cmd->add_option("--pulses", bill_opts.pulses, "consumption in pulses (1 Wh each)")->excludes(units_opt);
    bill_cmd->add_option("--mode", bill_opts.mode)
        ->check(CLI::IsMember({"prepaid", "postpaid"}))
        ->capture_default_str();
    bill_cmd->add_option("--paid", bill_opts.paid, "postpaid amount paid, BDT");
    bill_cmd->add_option("--schedule", bill_opts.schedule, "tariff schedule JSON (default demo flat)")
        ->check(CLI::ExistingFile);

    QueryOptions report_opts;
    auto* report_cmd = app.add_subcommand("report", "daily bill table as CSV");
    add_query_flags(report_cmd, report_opts);

    QueryOptions chart_opts;
    auto* chart_cmd = app.add_subcommand("chart", "daily kWh series as CSV");
    add_query_flags(chart_cmd, chart_opts);

    ProvisionOptions prov_opts;
    auto* prov_cmd = app.add_subcommand("provision", "save a Wi-Fi network for a device in a fleet file");
    prov_cmd->add_option("--fleet", prov_opts.fleet)->required()->check(CLI::ExistingFile);
    prov_cmd->add_option("--device", prov_opts.device, "chip ID")->required();
    prov_cmd->add_option("--ssid", prov_opts.ssid)->required();
    prov_cmd->add_option("--credential", prov_opts.credential)->required();
    prov_cmd->add_option("--out", prov_opts.out, "write here instead of rewriting --fleet");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*serve_cmd) return serve(serve_opts);
        if (*sim_cmd) return simulate(sim_opts);
        if (*bill_cmd) return bill(bill_opts);
        if (*report_cmd) return report(report_opts);
        if (*chart_cmd) return chart(chart_opts);
        if (*prov_cmd) return provision(prov_opts);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const ingest::LedgerCorrupt& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    } catch (const smartmeter::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kValidation;
}
