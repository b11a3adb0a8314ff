// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <httplib.h>
#include <json.hpp>
#include <signal.h>
#include <stdlib.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "smartmeter/analytics/daily.hpp"
#include "smartmeter/core/billing.hpp"
#include "smartmeter/core/tariff_json.hpp"
#include "smartmeter/ingest/config.hpp"
#include "smartmeter/ingest/device_client.hpp"
#include "smartmeter/ingest/device_server.hpp"
#include "smartmeter/ingest/http_api.hpp"
#include "smartmeter/ingest/service.hpp"
#include "smartmeter/sim/driver.hpp"

namespace smartmeter::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct HostPort {
    std::string host;
    int port = 0;
};

HostPort parse_host_port(std::string text) {
    if (text.rfind("http://", 0) == 0) {
        text.erase(0, 7);
    }
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0) {
        throw UsageError("server must be host:port, got '" + text + "'");
    }
    HostPort hp{text.substr(0, colon), 0};
    try {
        std::size_t used = 0;
        hp.port = std::stoi(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1 || hp.port <= 0 || hp.port > 65535) {
            throw std::out_of_range("port");
        }
    } catch (const std::logic_error&) {
        throw UsageError("bad port in '" + text + "'");
    }
    return hp;
}

core::TariffSchedule schedule_or_demo(const std::optional<fs::path>& path) {
    return path ? core::load_schedule_file(*path) : core::demo_flat_schedule();
}

std::ostream& open_output(const std::optional<fs::path>& path, std::ofstream& file) {
    if (!path) {
        return std::cout;
    }
    file.open(*path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw ServiceError("cannot write " + path->string());
    }
    return file;
}

// ---- HTTP client side (report, chart) ----

class ApiClient {
public:
    explicit ApiClient(const std::string& server) : addr_(parse_host_port(server)), http_(addr_.host, addr_.port) {
        http_.set_connection_timeout(5, 0);
        http_.set_read_timeout(30, 0);
    }

    void login(const std::string& user, const std::string& password) {
        const json body{{"user_id", user}, {"password", password}};
        auto res = http_.Post("/login", body.dump(), "application/json");
        token_ = expect_ok(res, "/login").at("token").get<std::string>();
    }

    void set_token(std::string token) { token_ = std::move(token); }

    json get(const std::string& path) {
        httplib::Headers headers{{"Authorization", "Bearer " + token_}};
        return expect_ok(http_.Get(path, headers), path);
    }

private:
    json expect_ok(const httplib::Result& res, const std::string& what) {
        if (!res) {
            throw ServiceError("cannot reach " + addr_.host + ":" + std::to_string(addr_.port) + " (" +
                               httplib::to_string(res.error()) + ")");
        }
        json body = json::parse(res->body, nullptr, false);
        if (res->status >= 200 && res->status < 300 && !body.is_discarded()) {
            return body;
        }
        std::string message = "HTTP " + std::to_string(res->status) + " from " + what;
        if (body.is_object() && body.contains("message")) {
            message += ": " + body["message"].get<std::string>();
        }
        if (res->status >= 400 && res->status < 500) {
            throw UsageError(message);
        }
        throw ServiceError(message);
    }

    HostPort addr_;
    httplib::Client http_;
    std::string token_;
};

std::string consumption_path(const QueryOptions& opts) {
    if (opts.device.empty()) {
        throw UsageError("--device is required");
    }
    if (opts.from.has_value() != opts.to.has_value()) {
        throw UsageError("give both --from and --to, or neither");
    }
    std::string path = "/devices/" + httplib::detail::encode_url(opts.device) + "/consumption";
    if (opts.from) {
        const auto from = parse_date(*opts.from);
        const auto to = parse_date(*opts.to);
        if (from > to) {
            throw UsageError("--from is after --to");
        }
        path += "?from=" + format_date(from) + "&to=" + format_date(to);
    }
    return path;
}

json fetch_rows(const QueryOptions& opts) {
    const auto path = consumption_path(opts);
    ApiClient api(opts.server);
    if (opts.user || opts.password) {
        if (!opts.user || !opts.password) {
            throw UsageError("--user and --password go together");
        }
        api.login(*opts.user, *opts.password);
    } else if (opts.token) {
        api.set_token(*opts.token);
    } else if (const char* env = std::getenv("SMARTMETER_TOKEN"); env && *env) {
        api.set_token(env);
    } else {
        throw UsageError("no credentials: pass --token, set SMARTMETER_TOKEN, or use --user/--password");
    }
    return api.get(path).at("rows");
}

// ---- simulate ----

sim::FleetDriver make_driver(const SimulateOptions& opts, sim::FleetDefinition fleet, sim::UplinkFactory factory) {
    std::vector<sim::FaultEvent> faults;
    if (opts.faults) {
        faults = sim::load_fault_file(*opts.faults, fleet.start);
    }
    return sim::FleetDriver(std::move(fleet), std::move(factory), {Duration{1'000}, opts.accel},
                            std::move(faults));
}

void register_with_retries(sim::FleetDriver& driver) {
    constexpr int kAttempts = 3;
    for (int attempt = 1;; ++attempt) {
        try {
            driver.register_all();
            return;
        } catch (const LinkError& e) {
            if (attempt == kAttempts) {
                throw ServiceError(std::string("device server unreachable: ") + e.what());
            }
            std::cerr << "register failed (" << e.what() << "), retrying\n";
            std::this_thread::sleep_for(std::chrono::milliseconds(500 * attempt));
        }
    }
}

int print_summaries(sim::FleetDriver& driver) {
    std::cout << "chip_id,crossings,acked,buffered,dropped,reports_accepted,reports_duplicate,server_count,state\n";
    bool conserved = true;
    for (const auto& s : driver.summaries()) {
        std::optional<ResumePoint> server;
        try {
            server = driver.uplink(s.chip_id).last_count(s.chip_id);
        } catch (const LinkError& e) {
            throw ServiceError("lost the device server: " + std::string(e.what()));
        }
        std::cout << s.chip_id << ',' << s.crossings << ',' << s.acked << ',' << s.buffered << ',' << s.dropped << ','
                  << s.reports_accepted << ',' << s.reports_duplicate << ','
                  << (server ? std::to_string(server->cumulative_pulses) : "") << ',' << sim::to_string(s.state)
                  << '\n';
        if (!s.conserved()) {
            std::cerr << s.chip_id << ": crossings != acked + buffered + dropped\n";
            conserved = false;
        }
    }
    return conserved ? kOk : kRuntime;
}

class ScratchDir {
public:
    ScratchDir() {
        auto pattern = (fs::temp_directory_path() / "smartmeter-sim-XXXXXX").string();
        if (!::mkdtemp(pattern.data())) {
            throw ServiceError("cannot create a scratch directory");
        }
        path_ = pattern;
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

} // namespace

int serve(const ServeOptions& opts) {
    ingest::ServiceConfig cfg = opts.config ? ingest::load_service_config(*opts.config) : ingest::ServiceConfig{};
    if (opts.bind) cfg.bind_address = *opts.bind;
    if (opts.device_port) cfg.device_port = static_cast<std::uint16_t>(*opts.device_port);
    if (opts.http_port) cfg.http_port = static_cast<std::uint16_t>(*opts.http_port);
    if (opts.ledger) cfg.ledger_path = *opts.ledger;
    if (opts.snapshot) cfg.snapshot_path = *opts.snapshot;

    // Block the stop signals before any thread starts so only sigwait sees them.
    sigset_t stop_signals;
    sigemptyset(&stop_signals);
    sigaddset(&stop_signals, SIGINT);
    sigaddset(&stop_signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

    ingest::IngestService service(cfg);
    const auto rec = service.recovery();
    std::cerr << "recovered " << service.state().next_offset() << " ledger records"
              << (rec.from_snapshot ? " (snapshot at " + std::to_string(rec.snapshot_offset) + ")" : "")
              << ", dropped " << rec.truncated_bytes << " torn bytes\n";

    ingest::DeviceServer devices(service, cfg.bind_address, cfg.device_port);
    devices.start();
    ingest::HttpApi http(service, cfg.bind_address, cfg.http_port);
    http.start();
    std::cout << "device_port=" << devices.port() << " http_port=" << http.port() << std::endl;

    int sig = 0;
    sigwait(&stop_signals, &sig);
    std::cerr << "stopping on signal " << sig << '\n';
    http.stop();
    devices.stop();
    return kOk;
}

int simulate(const SimulateOptions& opts) {
    if (opts.days < 0 || !std::isfinite(opts.days)) {
        throw UsageError("--days must be a non-negative number");
    }
    if (opts.accel < 0 || !std::isfinite(opts.accel)) {
        throw UsageError("--accel must be non-negative (0 runs unpaced)");
    }
    auto fleet = sim::load_fleet_file(opts.fleet);
    const Duration span{std::llround(opts.days * 86'400'000.0)};

    if (opts.offline) {
        ScratchDir scratch;
        ingest::ServiceConfig cfg;
        cfg.ledger_path = scratch.path() / "ledger.bin";
        cfg.snapshot_path.clear();
        ingest::IngestService service(cfg);
        auto driver = make_driver(opts, std::move(fleet), [&service](const sim::DeviceSpec&) {
            return std::make_unique<ingest::LocalUplink>(service);
        });
        driver.register_all();
        driver.run_for(span);
        driver.shutdown();
        return print_summaries(driver);
    }

    const auto addr = parse_host_port(opts.server);
    auto driver = make_driver(opts, std::move(fleet), [addr](const sim::DeviceSpec&) {
        return std::make_unique<ingest::TcpUplink>(addr.host, static_cast<std::uint16_t>(addr.port));
    });
    register_with_retries(driver);
    driver.run_for(span);
    driver.shutdown();
    return print_summaries(driver);
}

int bill(const BillOptions& opts) {
    const auto mode = parse_meter_mode(opts.mode);
    if (opts.units && opts.pulses) {
        throw UsageError("give --units or --pulses, not both");
    }
    const auto schedule = schedule_or_demo(opts.schedule);

    std::optional<core::EnergyKwh> units;
    if (opts.pulses) {
        units = core::round_kwh_billing(core::pulses_to_kwh({*opts.pulses}));
    } else if (opts.units) {
        units = core::round_kwh_billing(core::EnergyKwh::parse_kwh(*opts.units));
        if (*units < core::EnergyKwh{}) {
            throw UsageError("--units must not be negative");
        }
    }

    std::cout << "item,value\n";
    std::cout << "mode," << to_string(mode) << '\n';
    if (opts.pulses) {
        std::cout << "pulses," << *opts.pulses << '\n';
    }
    if (mode == MeterMode::prepaid) {
        if (!units) {
            throw UsageError("prepaid needs --units or --pulses");
        }
        if (opts.paid) {
            throw UsageError("--paid only applies to postpaid");
        }
        const auto b = core::prepaid_total_cost(*units, schedule);
        std::cout << "units," << units->to_string(1) << '\n';
        for (std::size_t i = 0; i < b.tier_charges.size(); ++i) {
            std::cout << "tier_" << (i + 1) << ',' << b.tier_charges[i].to_string() << '\n';
        }
        std::cout << "energy_charge," << b.energy_charge.to_string() << '\n'
                  << "demand_charge," << b.demand_charge.to_string() << '\n'
                  << "vat," << b.vat.to_string() << '\n'
                  << "total," << b.total.to_string() << '\n';
        return kOk;
    }

    if (!opts.paid) {
        throw UsageError("postpaid needs --paid");
    }
    const auto p = core::postpaid_purchasable(core::Money::parse(*opts.paid), schedule);
    if (units) {
        std::cout << "units," << units->to_string(1) << '\n';
    }
    std::cout << "paid_amount," << p.paid_amount.to_string() << '\n'
              << "vat," << p.vat.to_string() << '\n'
              << "meter_rent," << p.meter_rent.to_string() << '\n'
              << "demand_charge," << p.demand_charge.to_string() << '\n'
              << "purchasable," << p.purchasable.to_string() << '\n'
              << "rebate," << p.rebate.to_string() << '\n'
              << "purchasable_units," << p.purchasable_units.to_string(1) << '\n';
    return kOk;
}

int report(const QueryOptions& opts) {
    const auto rows = fetch_rows(opts);
    std::ofstream file;
    auto& out = open_output(opts.out, file);
    out << "day,pulses,kwh,vat,total\n";
    for (const auto& r : rows) {
        out << r.at("day").get<std::string>() << ',' << r.at("pulse_count").get<std::uint64_t>() << ','
            << r.at("kwh").get<std::string>() << ',' << r.at("vat").get<std::string>() << ','
            << r.at("total").get<std::string>() << '\n';
    }
    return kOk;
}

int chart(const QueryOptions& opts) {
    const auto rows = fetch_rows(opts);
    std::ofstream file;
    auto& out = open_output(opts.out, file);
    out << "day,kwh\n";
    for (const auto& r : rows) {
        out << r.at("day").get<std::string>() << ',' << r.at("kwh").get<std::string>() << '\n';
    }
    return kOk;
}

int provision(const ProvisionOptions& opts) {
    std::ifstream in(opts.fleet);
    if (!in) {
        throw UsageError("cannot read " + opts.fleet.string());
    }
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("devices") || !doc["devices"].is_array()) {
        throw UsageError(opts.fleet.string() + " is not a fleet document");
    }
    if (opts.ssid.empty()) {
        throw UsageError("--ssid must not be empty");
    }

    json* target = nullptr;
    for (auto& d : doc["devices"]) {
        if (d.value("chip_id", "") == opts.device) {
            target = &d;
        }
    }
    if (!target) {
        throw UsageError("no device " + opts.device + " in " + opts.fleet.string());
    }
    const auto state = sim::parse_firmware_state(target->value("start_state", "provisioned"));
    if (state != sim::FirmwareState::unprovisioned && state != sim::FirmwareState::provisioned) {
        throw UsageError("cannot provision a device starting in " + std::string(sim::to_string(state)));
    }
    (*target)["network"] = {{"ssid", opts.ssid}, {"credential", opts.credential}};
    (*target)["start_state"] = "provisioned";
    sim::parse_fleet(doc);  // the edited document must still load

    const auto dest = opts.out.value_or(opts.fleet);
    const auto tmp = fs::path(dest.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << doc.dump(2) << '\n';
        if (!out) {
            throw ServiceError("cannot write " + tmp.string());
        }
    }
    fs::rename(tmp, dest);
    std::cout << opts.device << ",provisioned," << opts.ssid << '\n';
    return kOk;
}

} // namespace smartmeter::cli
