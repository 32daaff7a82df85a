#pragma once

#include <string>

#include "model.hpp"

namespace fixtures {

// A -> B with P(A=1) = 0.4, P(B=1|A=0) = 0.2, P(B=1|A=1) = 0.9.
inline const char* kChain =
    "BAYES\n2\n2 2\n2\n1 0\n2 0 1\n\n"
    "2 0.6 0.4\n"
    "4 0.8 0.2 0.1 0.9\n";

// A -> C where C = 1 is impossible under A = 0.
inline const char* kZeroEntry =
    "BAYES\n2\n2 2\n2\n1 0\n2 0 1\n\n"
    "2 0.5 0.5\n"
    "4 1.0 0.0 0.4 0.6\n";

// Diamond A -> B, A -> C, {B, C} -> D, listed out of order.
inline const char* kDiamond =
    "BAYES\n4\n2 2 2 2\n4\n3 1 2 3\n1 0\n2 0 1\n2 0 2\n\n"
    "8 0.9 0.1 0.5 0.5 0.4 0.6 0.2 0.8\n"
    "2 0.3 0.7\n"
    "4 0.6 0.4 0.25 0.75\n"
    "4 0.1 0.9 0.7 0.3\n";

// Two binary roots with uniform priors and a leaf observed at 1 that is
// deterministically X1 OR X2, so (0,0) is ruled out.
inline const char* kForbidZeroZero =
    "BAYES\n3\n2 2 2\n3\n1 0\n1 1\n3 0 1 2\n\n"
    "2 0.5 0.5\n"
    "2 0.5 0.5\n"
    "8 1 0 0 1 0 1 0 1\n";

inline mlb::BeliefNetwork net(const char* text) { return mlb::parse_model(text); }

}  // namespace fixtures
