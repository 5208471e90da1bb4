#pragma once

#include <string>
#include <utility>
#include <vector>

namespace preflab {

// Unordered feature-id pair, stored with first <= second.
struct FeaturePair {
    std::string a;
    std::string b;

    FeaturePair() = default;
    FeaturePair(std::string x, std::string y);
    bool contains(const std::string& id) const { return a == id || b == id; }
    bool operator==(const FeaturePair&) const = default;
    std::string to_string() const { return a + "+" + b; }
};

// A 1-factorization of K10 over the feature ids: 9 rounds of 5 disjoint
// pairs, every one of the 45 unordered pairs covered exactly once.
struct PairsMatrix {
    std::vector<std::string> features;            // 10 ids, input order
    std::vector<std::vector<FeaturePair>> rounds;  // 9 x 5

    // Serialization used in run manifests: one round per line, "idA+idB"
    // pairs separated by spaces.
    std::string to_text() const;
    static PairsMatrix from_text(const std::string& text);
};

// Round-robin (circle method) construction: fix the last feature; in round
// r pair (last, r) and ((r+k) mod n-1, (r-k) mod n-1) for k = 1..n/2-1.
// Generic over even feature counts; the artifact uses n = 10.
PairsMatrix build_pairs_matrix(const std::vector<std::string>& features);

// Where a pair's two features live in a given dataset (round).
struct ConflictPair {
    FeaturePair pair;
    // Per round: class index whose pair contains `pair.a` / `pair.b`.
    std::vector<int> class_of_a;
    std::vector<int> class_of_b;
    // True where the pair is itself round r's trained class.
    std::vector<bool> is_trained;
};

// All 45 pairs annotated, per round, with the class indices containing each
// feature.
std::vector<ConflictPair> conflict_pairs(const PairsMatrix& matrix);

}  // namespace preflab
