#pragma once

#include "dtwist/circle_map.hpp"
#include "dtwist/layout.hpp"
#include "dtwist/profiles.hpp"
#include "dtwist/sequences.hpp"

namespace fixture {

struct Built {
    dtwist::SeqParams params;
    dtwist::ProfileSet profiles;
    dtwist::GapSequences seq;
    dtwist::GapTable table;
    dtwist::DenjoyMap map;

    explicit Built(dtwist::SeqParams p = {})
        : params(p), profiles(dtwist::ProfileSet::calibrate(1e-13)), seq(dtwist::build_sequences(p)),
          table(seq, p.omega), map(seq, table, profiles, p.swap_gamma)
    {
    }
};

inline const Built& defaults()
{
    static const Built b;
    return b;
}

} // namespace fixture
