// Command-line front end: `serve` runs one storage daemon, `run` drives a
// verified workload over inproc or TCP endpoints, `bench` sweeps a grid and
// emits CSV.  Every run checks each returned value against a plaintext
// reference store; there is no unverified mode.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <future>
#include <random>
#include <string>
#include <vector>

#include "cforam/bench.hpp"
#include "cforam/errors.hpp"
#include "cforam/server.hpp"

using namespace cforam;

namespace {

Scheme parse_scheme(const std::string& s) {
    if (s == "cforam") return Scheme::Base;
    if (s == "cforam-plus" || s == "cforam+") return Scheme::Plus;
    throw BadRequest("unknown scheme '" + s + "' (want cforam | cforam-plus)");
}

uint16_t parse_listen_port(const std::string& listen) {
    std::string host = "127.0.0.1";
    std::string port_part = listen;
    auto colon = listen.rfind(':');
    if (colon != std::string::npos) {
        host = listen.substr(0, colon);
        port_part = listen.substr(colon + 1);
    }
    if (host != "127.0.0.1" && host != "localhost" && host != "0.0.0.0" &&
        !host.empty()) {
        throw BadRequest("serve binds loopback only; cannot listen on '" +
                         host + "'");
    }
    unsigned long port = 0;
    try {
        port = std::stoul(port_part);
    } catch (const std::exception&) {
        throw BadRequest("bad listen port '" + port_part + "'");
    }
    if (port > 65535) throw BadRequest("listen port out of range");
    return uint16_t(port);
}

int cmd_serve(const std::string& role, const std::string& listen, uint64_t n,
              uint32_t block_bytes, uint32_t latency_ms,
              std::optional<uint64_t> shuffle_seed) {
    ServerSession::Options opt;
    if (role == "0" || role == "s0")
        opt.role = 0;
    else if (role == "1" || role == "s1")
        opt.role = 1;
    else
        throw BadRequest("role must be 0 or 1 (aliases s0/s1)");
    opt.expected = Params::from_n(n, block_bytes);
    opt.min_latency_us = latency_ms * 1000;
    opt.shuffle_seed =
        shuffle_seed ? *shuffle_seed : std::random_device{}();

    TcpServer server(parse_listen_port(listen), opt);
    std::printf("serving role %d on 127.0.0.1:%u (n=%llu, block=%u)\n",
                opt.role, server.port(), (unsigned long long)n, block_bytes);
    std::fflush(stdout);
    // Serve until killed.
    std::promise<void>().get_future().wait();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-server oblivious storage toolkit"};
    app.require_subcommand(1);

    // serve ------------------------------------------------------------------
    auto* serve = app.add_subcommand("serve", "Run one storage server daemon");
    std::string sv_role;
    std::string sv_listen = "127.0.0.1:0";
    uint64_t sv_n = 256;
    uint32_t sv_block = 32;
    uint32_t sv_latency_ms = 0;
    std::optional<uint64_t> sv_shuffle;
    serve->add_option("--role", sv_role, "server role: 0 or 1")->required();
    serve->add_option("--listen", sv_listen, "listen address host:port");
    serve->add_option("--n", sv_n, "capacity (power of two)")->required();
    serve->add_option("--block-size", sv_block, "value bytes per address")
        ->required();
    serve->add_option("--latency-ms", sv_latency_ms,
                      "simulated inbound delay floor, milliseconds");
    serve->add_option("--shuffle-seed", sv_shuffle,
                      "deterministic rebuild-shuffle seed (default: random)");

    // run --------------------------------------------------------------------
    auto* run = app.add_subcommand(
        "run", "Drive one verified workload and print a cost report");
    RunSpec rs;
    std::string run_scheme = "cforam";
    std::string run_transport = "inproc";
    std::vector<std::string> run_servers;
    double run_zipf = 0.0;
    uint32_t run_latency_ms = 0;
    run->add_option("--scheme", run_scheme, "cforam | cforam-plus");
    run->add_option("--transport", run_transport, "inproc | tcp");
    run->add_option("--servers", run_servers,
                    "two host:port endpoints (tcp transport)")
        ->delimiter(',');
    run->add_option("--n", rs.n, "capacity (power of two)")->required();
    run->add_option("--block-size", rs.block_bytes, "value bytes per address")
        ->required();
    run->add_option("--ops", rs.ops, "number of accesses")->required();
    run->add_option("--seed", rs.seed, "workload + client seed");
    run->add_option("--write-frac", rs.write_fraction,
                    "fraction of ops that are writes");
    run->add_option("--zipf", run_zipf,
                    "Zipf exponent for addresses (default: uniform)");
    run->add_option("--latency-ms", run_latency_ms,
                    "simulated one-way delay, milliseconds");

    // bench ------------------------------------------------------------------
    auto* bench = app.add_subcommand(
        "bench", "Sweep a (n, block, scheme) grid and emit CSV");
    BenchSpec bs;
    std::vector<std::string> bench_schemes = {"cforam", "cforam-plus"};
    std::string csv_path = "-";
    bench->add_option("--n-list", bs.n_list, "capacities to sweep")
        ->delimiter(',')
        ->required();
    bench->add_option("--b-list", bs.b_list, "block sizes to sweep")
        ->delimiter(',')
        ->required();
    bench->add_option("--schemes", bench_schemes, "schemes to sweep")
        ->delimiter(',');
    bench->add_option("--csv", csv_path, "output path ('-' for stdout)");
    bench->add_option("--seed", bs.seed, "workload + client seed");
    uint64_t bench_ops = 0;
    bench->add_option("--ops", bench_ops,
                      "accesses per grid point (default: one full epoch)");
    uint32_t bench_latency_ms = 0;
    bench->add_option("--latency-ms", bench_latency_ms,
                      "simulated one-way delay, milliseconds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (serve->parsed()) {
            return cmd_serve(sv_role, sv_listen, sv_n, sv_block, sv_latency_ms,
                             sv_shuffle);
        }
        if (run->parsed()) {
            rs.scheme = parse_scheme(run_scheme);
            if (run_transport == "inproc") {
                rs.transport = TransportKind::Inproc;
            } else if (run_transport == "tcp") {
                rs.transport = TransportKind::Tcp;
                if (run_servers.size() != 2) {
                    throw BadRequest(
                        "tcp transport needs --servers host:port,host:port");
                }
                rs.server0 = run_servers[0];
                rs.server1 = run_servers[1];
            } else {
                throw BadRequest("transport must be inproc or tcp");
            }
            if (run->count("--zipf")) {
                rs.dist = AddrDist::Zipf;
                rs.zipf_theta = run_zipf;
            }
            rs.latency_us = run_latency_ms * 1000;
            RunReport rep = run_workload(rs);
            std::fputs(format_report(rep).c_str(), stdout);
            return 0;
        }
        // bench
        bs.schemes.clear();
        for (const std::string& s : bench_schemes)
            bs.schemes.push_back(parse_scheme(s));
        if (bench->count("--ops")) bs.ops_per_point = bench_ops;
        bs.latency_us = bench_latency_ms * 1000;
        std::string csv = bench_csv(bench_run(bs));
        if (csv_path == "-") {
            std::fputs(csv.c_str(), stdout);
        } else {
            std::ofstream out(csv_path, std::ios::trunc);
            if (!out) throw BadRequest("cannot open '" + csv_path + "'");
            out << csv;
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
