#include "fanclose/sieve.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "fanclose/triple.hpp"

namespace fc {

namespace {

mpz_class ipow(const mpz_class& b, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

const mpz_class kRMin = 3200000;    // 20^5
const mpz_class kFMin = 10000000;   // 10^7

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

SieveCounts& SieveCounts::operator+=(const SieveCounts& o) {
    enumerated += o.enumerated;
    filtered += o.filtered;
    reduced += o.reduced;
    unresolved += o.unresolved;
    return *this;
}

std::uint64_t fnv1a64(const std::string& data, std::uint64_t h) {
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string FRecord::to_jsonl() const {
    nlohmann::ordered_json j;
    j["F"] = F;
    j["level"] = level;
    j["enumerated"] = counts.enumerated;
    j["filtered"] = counts.filtered;
    j["reduced"] = counts.reduced;
    j["unresolved"] = counts.unresolved;
    j["hash"] = hex64(hash);
    return j.dump();
}

FRecord FRecord::from_jsonl(const std::string& line) {
    try {
        auto j = nlohmann::json::parse(line);
        FRecord r;
        r.F = j.at("F").get<long>();
        r.level = j.at("level").get<int>();
        r.counts.enumerated = j.at("enumerated").get<std::uint64_t>();
        r.counts.filtered = j.at("filtered").get<std::uint64_t>();
        r.counts.reduced = j.at("reduced").get<std::uint64_t>();
        r.counts.unresolved = j.at("unresolved").get<std::uint64_t>();
        std::string h = j.at("hash").get<std::string>();
        std::size_t used = 0;
        if (h.size() != 16) throw CheckpointCorrupt("hash must be 16 hex digits");
        r.hash = std::stoull(h, &used, 16);
        if (used != h.size()) throw CheckpointCorrupt("hash is not hex");
        const auto& c = r.counts;
        if (c.filtered + c.reduced + c.unresolved != c.enumerated) throw CheckpointCorrupt("counts do not add up");
        return r;
    } catch (const CheckpointCorrupt&) {
        throw;
    } catch (const std::exception& e) {
        throw CheckpointCorrupt(std::string("bad checkpoint line: ") + e.what());
    }
}

std::vector<PellPoint> sieve_points(long F, const SieveSettings& st) {
    if (st.level < 1 || st.level > 5) throw DomainViolation("sieve level must be 1..5");
    // f < s and |F_{i-1}| <= (2s)^{i-1} s give x = f + F_i F_{i-1} <= S + |F| (2S)^{i-1} S
    const mpz_class S = isqrt(st.c_cap);
    const mpz_class x_cap = S + abs(mpz_class(F)) * ipow(2 * S, st.level - 1) * S;
    return sieve_equation_points(mpz_class(F), x_cap);
}

SieveCandidate invert(long F, int level, const PellPoint& pt, int sign, std::size_t index) {
    SieveCandidate c;
    c.level = level;
    c.F = F;
    c.orbit_index = index;
    c.x = pt.x;
    c.y = sign < 0 ? mpz_class(-pt.y) : pt.y;
    const mpz_class Fz = F;
    c.f = c.x - Fz * c.y;
    // y stands for F_{level-1}; level 1 gives r = -y, s = F + 2rf
    auto P = p_sequence(c.f, level);  // P_{-1..level}
    auto Pi = [&](long i) -> const mpz_class& { return P.at(static_cast<std::size_t>(i + 1)); };
    c.r = Pi(level - 2) * Fz - Pi(level - 1) * c.y;
    c.s = Pi(level - 1) * Fz - Pi(level) * c.y;
    return c;
}

FRecord sieve_F(long F, const SieveSettings& st, const CandidateSink& sink) {
    if (F > -2 && F < 2) throw DomainViolation("sieve needs |F| >= 2");
    FRecord rec;
    rec.F = F;
    rec.level = st.level;
    rec.exceptional = base_solutions_eqDD(mpz_class(F)).size() - 1;
    const auto pts = sieve_points(F, st);
    std::uint64_t h = fnv1a64("level=" + std::to_string(st.level) + ";F=" + std::to_string(F) + ";");
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (int sign : {-1, 1}) {
            if (pts[i].y == 0 && sign > 0) continue;
            SieveCandidate c = invert(F, st.level, pts[i], sign, i);
            ++rec.counts.enumerated;
            // predicates run lazily: powers of an oversized s are expensive
            auto test = [&](const char* name, auto&& pred) {
                if (!c.rejection.empty()) return;
                bool ok = pred();
                c.filters.emplace_back(name, ok);
                if (!ok) c.rejection = name;
            };
            test("positive", [&] { return c.r > 0 && c.s > 0 && c.f > 0; });
            test("c<=c_cap", [&] { return c.s * c.s + 1 <= st.c_cap; });
            if (st.level == 1) test("r>20^5", [&] { return c.r > kRMin; });
            test("s>r^1.23", [&] { return ipow(c.s, 100) > ipow(c.r, 123); });
            if (st.level == 1)
                test("s<r^3", [&] { return c.s < ipow(c.r, 3); });
            else
                test("s<r^2.05", [&] { return ipow(c.s, 20) < ipow(c.r, 41); });
            test("f>10^7", [&] { return c.f > kFMin; });
            if (c.r > 0 && c.s > c.r && c.f > 0) {
                // inversion soundness through the triple
                TripleParams tp = build_triple(c.r, c.s);
                FSequence q = f_sequence(tp, st.level);
                if (tp.f != c.f || q.Fi(st.level) != F || q.Fi(st.level - 1) != c.y)
                    throw InvariantBroken("inversion of (" + c.x.get_str() + ", " + c.y.get_str() + ") at F = " +
                                          std::to_string(F) + " does not reproduce F_" + std::to_string(st.level));
            }
            // hex keeps the tag linear in the size of r, s, f
            std::string tag = std::to_string(i) + (sign < 0 ? "-" : "+") + ":" + c.r.get_str(16) + "," +
                              c.s.get_str(16) + "," + c.f.get_str(16) + ":";
            if (!c.rejection.empty()) {
                ++rec.counts.filtered;
                tag += "x " + c.rejection;
            } else {
                try {
                    c.outcome = reduce_candidate(c.r, c.s, st.digits, st.digits_max);
                    tag += "n<=" + c.outcome->result.final_bound.get_str();
                    if (c.outcome->resolved)
                        ++rec.counts.reduced;
                    else
                        ++rec.counts.unresolved;
                } catch (const NoConvergentWorks&) {
                    ++rec.counts.unresolved;
                    tag += "no convergent";
                    c.rejection.clear();
                }
            }
            h = fnv1a64(tag + ";", h);
            if (sink) sink(c);
        }
    rec.hash = h;
    return rec;
}

std::vector<FRecord> load_checkpoint(const std::string& path, const ShardSpec& spec) {
    std::vector<FRecord> out;
    std::ifstream in(path, std::ios::binary);
    if (!in) return out;
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::size_t pos = 0, kept = 0;
    std::set<long> seen;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) break;  // interrupted write
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;
        FRecord r = FRecord::from_jsonl(line);
        if (r.level != spec.settings.level)
            throw CheckpointCorrupt("level mismatch: checkpoint " + path + " holds level " + std::to_string(r.level) +
                                    ", run is level " + std::to_string(spec.settings.level));
        long a = r.F < 0 ? -r.F : r.F;
        if (a < spec.F_lo || a > spec.F_hi) throw CheckpointCorrupt("F = " + std::to_string(r.F) + " outside shard");
        if (!seen.insert(r.F).second) throw CheckpointCorrupt("F = " + std::to_string(r.F) + " appears twice");
        out.push_back(r);
        kept = pos;
    }
    if (kept != text.size()) {
        // drop the partial tail so appends start on a fresh line
        std::ofstream fix(path, std::ios::binary | std::ios::trunc);
        fix << text.substr(0, kept);
    }
    return out;
}

ShardResult run_shard(const ShardSpec& spec, const CandidateSink& sink) {
    if (spec.F_lo < 2 || spec.F_lo > spec.F_hi) throw DomainViolation("shard needs 2 <= F_lo <= F_hi");
    ShardResult res;
    std::set<long> done;
    if (!spec.checkpoint_path.empty()) {
        for (auto& r : load_checkpoint(spec.checkpoint_path, spec)) {
            done.insert(r.F);
            res.total += r.counts;
            res.records.push_back(r);
        }
        res.resumed = res.records.size();
    }
    std::ofstream out;
    if (!spec.checkpoint_path.empty()) {
        auto parent = std::filesystem::path(spec.checkpoint_path).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        out.open(spec.checkpoint_path, std::ios::binary | std::ios::app);
        if (!out) throw UsageError("cannot write checkpoint " + spec.checkpoint_path);
    }
    for (long a = spec.F_lo; a <= spec.F_hi; ++a)
        for (long F : {a, -a}) {
            if (done.count(F)) continue;
            FRecord r = sieve_F(F, spec.settings, sink);
            if (r.exceptional > 1)
                res.notes.push_back("F = " + std::to_string(F) + " has " + std::to_string(r.exceptional) +
                                    " exceptional base solutions");
            if (out) {
                out << r.to_jsonl() << '\n';
                out.flush();
            }
            res.total += r.counts;
            res.records.push_back(r);
        }
    return res;
}

std::vector<ShardSpec> split_shards(const SieveSettings& st, long lo, long hi, unsigned n, const std::string& dir) {
    if (lo < 2 || lo > hi) throw DomainViolation("sieve range needs 2 <= from <= to");
    if (n == 0) throw UsageError("need at least one shard");
    const long width = hi - lo + 1;
    if (static_cast<long>(n) > width) n = static_cast<unsigned>(width);
    std::vector<ShardSpec> out;
    long start = lo;
    for (unsigned k = 0; k < n; ++k) {
        long len = width / n + (static_cast<long>(k) < width % n ? 1 : 0);
        ShardSpec s;
        s.settings = st;
        s.F_lo = start;
        s.F_hi = start + len - 1;
        if (!dir.empty()) s.checkpoint_path = (std::filesystem::path(dir) / ("shard-" + std::to_string(k) + ".jsonl")).string();
        out.push_back(s);
        start += len;
    }
    return out;
}

SieveSummary run_sieve(const std::vector<ShardSpec>& shards, unsigned jobs, const CandidateSink& sink) {
    SieveSummary sum;
    sum.shards.resize(shards.size());
    std::mutex m;
    CandidateSink locked;
    if (sink)
        locked = [&](const SieveCandidate& c) {
            std::lock_guard<std::mutex> g(m);
            sink(c);
        };
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    auto work = [&] {
        for (std::size_t k; (k = next++) < shards.size();) {
            try {
                sum.shards[k] = run_shard(shards[k], locked);
            } catch (...) {
                std::lock_guard<std::mutex> g(m);
                if (!err) err = std::current_exception();
                next = shards.size();
            }
        }
    };
    if (jobs <= 1 || shards.size() <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs && j < shards.size(); ++j) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);
    for (auto& s : sum.shards) sum.total += s.total;
    return sum;
}

}  // namespace fc
