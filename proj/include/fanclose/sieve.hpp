#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fanclose/pell.hpp"
#include "fanclose/reduction.hpp"

namespace fc {

// One inverted solution of x^2 - (F^2+1) y^2 = F^2 at a given level.
struct SieveCandidate {
    int level = 1;
    long F = 0;
    std::size_t orbit_index = 0;  // position in the sorted point list
    mpz_class x, y;               // y carries the sign used for F_{level-1}
    mpz_class r, s, f;
    std::vector<std::pair<std::string, bool>> filters;  // evaluated in order, stops at the first failure
    std::string rejection;                              // empty for survivors
    std::optional<CandidateReduction> outcome;
};

struct SieveCounts {
    std::uint64_t enumerated = 0, filtered = 0, reduced = 0, unresolved = 0;
    SieveCounts& operator+=(const SieveCounts& o);
    bool operator==(const SieveCounts& o) const = default;
};

// One checkpoint line.
struct FRecord {
    long F = 0;
    int level = 1;
    SieveCounts counts;
    std::uint64_t hash = 0;
    std::size_t exceptional = 0;  // exceptional base solutions seen (not persisted)

    std::string to_jsonl() const;
    static FRecord from_jsonl(const std::string& line);  // throws CheckpointCorrupt
};

std::uint64_t fnv1a64(const std::string& data, std::uint64_t h = 0xcbf29ce484222325ULL);

struct SieveSettings {
    int level = 1;
    mpz_class c_cap = mpz_class("1" + std::string(99, '0'));
    unsigned digits = 173, digits_max = 2000;
};

using CandidateSink = std::function<void(const SieveCandidate&)>;

// Solutions (x, y), x > 0, y >= 0, with x below the cap implied by c <= c_cap.
std::vector<PellPoint> sieve_points(long F, const SieveSettings& st);

// Level 1 uses r = y, f = x + rF, s = F + 2rf; level i >= 2 uses
// f = x - F y, r = P_{i-2}F - P_{i-1}y, s = P_{i-1}F - P_i y with y = +-Y.
SieveCandidate invert(long F, int level, const PellPoint& pt, int sign, std::size_t index);

// Filters, inversion check and reduction for one signed F.
FRecord sieve_F(long F, const SieveSettings& st, const CandidateSink& sink = {});

struct ShardSpec {
    SieveSettings settings;
    long F_lo = 2, F_hi = 2;     // magnitudes; each yields F and -F
    std::string checkpoint_path;  // empty: no checkpoint
};

struct ShardResult {
    SieveCounts total;
    std::vector<FRecord> records;  // in processing order, resumed ones first
    std::size_t resumed = 0;
    std::vector<std::string> notes;
};

// Loads a checkpoint. A trailing line without newline (interrupted write) is
// dropped; any other malformed line, a foreign level or an F outside the shard
// throws CheckpointCorrupt.
std::vector<FRecord> load_checkpoint(const std::string& path, const ShardSpec& spec);

// Processes the shard, skipping F values already in its checkpoint.
ShardResult run_shard(const ShardSpec& spec, const CandidateSink& sink = {});

// Splits [lo, hi] into n contiguous shards; checkpoints go to dir/shard-<k>.jsonl.
std::vector<ShardSpec> split_shards(const SieveSettings& st, long lo, long hi, unsigned n, const std::string& dir);

struct SieveSummary {
    SieveCounts total;
    std::vector<ShardResult> shards;
};

// Runs the shards on at most `jobs` threads; the merge is order independent.
SieveSummary run_sieve(const std::vector<ShardSpec>& shards, unsigned jobs, const CandidateSink& sink = {});

}  // namespace fc
