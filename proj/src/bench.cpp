#include "cforam/bench.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "cforam/errors.hpp"
#include "cforam/server.hpp"

namespace cforam {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::pair<std::string, uint16_t> parse_hostport(const std::string& s) {
    auto colon = s.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
        throw BadRequest("server address must be host:port, got '" + s + "'");
    unsigned long port = 0;
    try {
        port = std::stoul(s.substr(colon + 1));
    } catch (const std::exception&) {
        throw BadRequest("bad port in server address '" + s + "'");
    }
    if (port == 0 || port > 65535)
        throw BadRequest("port out of range in server address '" + s + "'");
    return {s.substr(0, colon), uint16_t(port)};
}

void dump_transcript(const TranscriptRecorder& rec, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw BadRequest("cannot open transcript log '" + path + "'");
    for (const TranscriptEntry& e : rec.entries()) {
        if (e.access_index == kSetupAccessIndex)
            out << "access=setup";
        else
            out << "access=" << e.access_index;
        out << " phase=" << phase_name(e.phase) << " server=" << int(e.server)
            << (e.outgoing ? " dir=send" : " dir=recv")
            << " type=" << msg_type_name(e.type) << " len=" << e.payload_len
            << '\n';
    }
}

}  // namespace

RunReport run_workload(const RunSpec& rs) {
    WorkloadSpec ws;
    ws.n = rs.n;
    ws.block_bytes = rs.block_bytes;
    ws.num_ops = rs.ops;
    ws.write_fraction = rs.write_fraction;
    ws.dist = rs.dist;
    ws.zipf_theta = rs.zipf_theta;
    ws.seed = rs.seed;
    WorkloadGen gen(ws);

    Params params = Params::from_n(rs.n, rs.block_bytes);

    BandwidthMeter meter;
    TranscriptRecorder recorder;
    const char* log_path = std::getenv("ORAM_LOG");
    bool logging = log_path != nullptr && *log_path != '\0';
    if (logging) recorder.enable(/*capture_payloads=*/false);

    // Bring up the two endpoints for the chosen transport.
    std::unique_ptr<InprocServer> local[2];
    std::unique_ptr<Channel> remote[2];
    Channel* ch[2] = {nullptr, nullptr};
    if (rs.transport == TransportKind::Inproc) {
        for (int b = 0; b < 2; ++b) {
            ServerSession::Options opt;
            opt.role = b;
            opt.shuffle_seed = rs.seed ^ (b == 0 ? 0xA0A0 : 0xB1B1);
            local[b] = std::make_unique<InprocServer>(opt);
            ch[b] = &local[b]->client_channel();
        }
    } else {
        auto [h0, p0] = parse_hostport(rs.server0);
        auto [h1, p1] = parse_hostport(rs.server1);
        remote[0] = tcp_connect(h0, p0);
        remote[1] = tcp_connect(h1, p1);
        ch[0] = remote[0].get();
        ch[1] = remote[1].get();
    }

    ClientConfig cfg;
    cfg.scheme = rs.scheme;
    cfg.seed = rs.seed;
    cfg.latency_us = rs.latency_us;
    Client client(params,
                  PeerLink{ch[0], 0, &meter, logging ? &recorder : nullptr},
                  PeerLink{ch[1], 1, &meter, logging ? &recorder : nullptr},
                  cfg);

    OracleStore oracle(rs.n, rs.block_bytes);
    auto t0 = Clock::now();
    {
        std::vector<Element> initial = gen.initial_elements();
        for (const Element& e : initial) oracle.put_initial(e.addr, e.value);
        client.setup(initial);
    }
    RunReport report;
    report.spec = rs;
    report.setup_seconds = seconds_since(t0);

    t0 = Clock::now();
    for (uint64_t i = 0; i < rs.ops; ++i) {
        Op op = gen.next();
        Bytes got = client.access(op.is_write, op.addr, op.value);
        Bytes want = oracle.apply(op.is_write, op.addr, op.value);
        if (got != want)
            throw MismatchAt(i, "returned value diverges from the reference");
    }
    report.run_seconds = seconds_since(t0);

    for (int p = 0; p < kPhaseCount; ++p)
        report.phase_total[p] = meter.phase_total(Phase(p));
    report.online = meter.online_total();
    report.stats = client.stats();

    if (logging) dump_transcript(recorder, log_path);
    for (auto& srv : local)
        if (srv) srv->stop();
    return report;
}

std::string format_report(const RunReport& r) {
    char buf[256];
    std::string out;
    auto line = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        out += buf;
        out += '\n';
    };
    line("scheme          %s", scheme_name(r.spec.scheme));
    line("transport       %s",
         r.spec.transport == TransportKind::Inproc ? "inproc" : "tcp");
    line("n               %llu", (unsigned long long)r.spec.n);
    line("block_bytes     %u", r.spec.block_bytes);
    line("ops             %llu", (unsigned long long)r.spec.ops);
    line("seed            %llu", (unsigned long long)r.spec.seed);
    for (int p = 0; p < kPhaseCount; ++p) {
        const FlowCounter& c = r.phase_total[p];
        line("%-7s traffic  %llu bytes payload, %llu bytes on the wire, %llu frames",
             phase_name(Phase(p)), (unsigned long long)c.payload_bytes,
             (unsigned long long)c.wire_bytes, (unsigned long long)c.frames);
    }
    line("setup time      %.3f s", r.setup_seconds);
    line("run time        %.3f s", r.run_seconds);
    line("amortized       %.1f payload bytes/access, %.3f ms/access",
         r.amortized_bytes(), r.amortized_ms());
    line("rebuilds        top %llu, mid %llu, bottom %llu",
         (unsigned long long)r.stats.rebuilds_top,
         (unsigned long long)r.stats.rebuilds_mid,
         (unsigned long long)r.stats.rebuilds_bottom);
    line("oracle          %llu/%llu values verified",
         (unsigned long long)r.spec.ops, (unsigned long long)r.spec.ops);
    return out;
}

std::vector<BenchPoint> bench_run(const BenchSpec& spec) {
    if (spec.n_list.empty() || spec.b_list.empty() || spec.schemes.empty())
        throw BadRequest("bench grid must have at least one n, b and scheme");
    std::vector<BenchPoint> out;
    for (uint64_t n : spec.n_list) {
        for (uint32_t b : spec.b_list) {
            for (Scheme s : spec.schemes) {
                RunSpec rs;
                rs.scheme = s;
                rs.n = n;
                rs.block_bytes = b;
                // Default: one full bottom epoch, so the amortized figure
                // includes every rebuild tier at its steady-state frequency.
                rs.ops = spec.ops_per_point ? *spec.ops_per_point : n;
                rs.seed = spec.seed;
                rs.latency_us = spec.latency_us;
                RunReport rep = run_workload(rs);
                BenchPoint pt;
                pt.scheme = s;
                pt.n = n;
                pt.block_bytes = b;
                pt.ops = rs.ops;
                pt.amortized_bytes = rep.amortized_bytes();
                pt.amortized_ms = rep.amortized_ms();
                pt.setup_s = rep.setup_seconds;
                pt.rebuild_share =
                    rep.online.payload_bytes
                        ? double(rep.phase_total[int(Phase::Rebuild)].payload_bytes) /
                              double(rep.online.payload_bytes)
                        : 0.0;
                out.push_back(pt);
            }
        }
    }
    return out;
}

std::string bench_csv(const std::vector<BenchPoint>& points) {
    std::string out =
        "scheme,n,block_bytes,ops,amortized_bytes,amortized_ms,setup_s,"
        "rebuild_share,ratio_vs_cforam\n";
    char buf[256];
    for (const BenchPoint& pt : points) {
        std::string ratio;
        if (pt.scheme == Scheme::Plus) {
            for (const BenchPoint& base : points) {
                if (base.scheme == Scheme::Base && base.n == pt.n &&
                    base.block_bytes == pt.block_bytes &&
                    base.amortized_bytes > 0.0) {
                    std::snprintf(buf, sizeof buf, "%.6f",
                                  pt.amortized_bytes / base.amortized_bytes);
                    ratio = buf;
                    break;
                }
            }
        }
        std::snprintf(buf, sizeof buf, "%s,%llu,%u,%llu,%.3f,%.6f,%.6f,%.6f,",
                      scheme_name(pt.scheme), (unsigned long long)pt.n,
                      pt.block_bytes, (unsigned long long)pt.ops,
                      pt.amortized_bytes, pt.amortized_ms, pt.setup_s,
                      pt.rebuild_share);
        out += buf;
        out += ratio;
        out += '\n';
    }
    return out;
}

}  // namespace cforam
