#include "preflab/pairs.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "preflab/errors.hpp"

namespace preflab {

FeaturePair::FeaturePair(std::string x, std::string y) {
    if (x == y) throw InputError("FeaturePair: features must differ ('" + x + "')");
    if (y < x) std::swap(x, y);
    a = std::move(x);
    b = std::move(y);
}

std::string PairsMatrix::to_text() const {
    std::ostringstream os;
    for (const auto& round : rounds) {
        for (std::size_t i = 0; i < round.size(); ++i)
            os << (i ? " " : "") << round[i].to_string();
        os << '\n';
    }
    return os.str();
}

PairsMatrix PairsMatrix::from_text(const std::string& text) {
    PairsMatrix m;
    std::unordered_set<std::string> ids;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        std::vector<FeaturePair> round;
        std::istringstream toks(line);
        std::string tok;
        while (toks >> tok) {
            auto plus = tok.find('+');
            if (plus == std::string::npos)
                throw FormatError("pairs matrix text: missing '+' in '" + tok + "'");
            FeaturePair p(tok.substr(0, plus), tok.substr(plus + 1));
            for (const auto& id : {p.a, p.b})
                if (ids.insert(id).second) m.features.push_back(id);
            round.push_back(std::move(p));
        }
        m.rounds.push_back(std::move(round));
    }
    std::sort(m.features.begin(), m.features.end());
    return m;
}

PairsMatrix build_pairs_matrix(const std::vector<std::string>& features) {
    const int n = static_cast<int>(features.size());
    if (n < 4 || n % 2 != 0)
        throw InputError("build_pairs_matrix: need an even feature count >= 4, got " +
                         std::to_string(n));
    std::unordered_set<std::string> seen(features.begin(), features.end());
    if (static_cast<int>(seen.size()) != n)
        throw InputError("build_pairs_matrix: feature ids must be distinct");

    const int m = n - 1;
    PairsMatrix matrix;
    matrix.features = features;
    for (int r = 0; r < m; ++r) {
        std::vector<FeaturePair> round;
        round.emplace_back(features[n - 1], features[r]);
        for (int k = 1; k <= n / 2 - 1; ++k)
            round.emplace_back(features[(r + k) % m], features[((r - k) % m + m) % m]);
        matrix.rounds.push_back(std::move(round));
    }
    return matrix;
}

std::vector<ConflictPair> conflict_pairs(const PairsMatrix& matrix) {
    const auto& ids = matrix.features;
    const int rounds = static_cast<int>(matrix.rounds.size());

    std::vector<ConflictPair> out;
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            ConflictPair cp;
            cp.pair = FeaturePair(ids[i], ids[j]);
            cp.class_of_a.assign(rounds, -1);
            cp.class_of_b.assign(rounds, -1);
            cp.is_trained.assign(rounds, false);
            out.push_back(std::move(cp));
        }

    for (auto& cp : out) {
        for (int r = 0; r < rounds; ++r) {
            const auto& round = matrix.rounds[r];
            for (int c = 0; c < static_cast<int>(round.size()); ++c) {
                if (round[c].contains(cp.pair.a)) cp.class_of_a[r] = c;
                if (round[c].contains(cp.pair.b)) cp.class_of_b[r] = c;
                if (round[c] == cp.pair) cp.is_trained[r] = true;
            }
            if (cp.class_of_a[r] < 0 || cp.class_of_b[r] < 0)
                throw StateError("conflict_pairs: feature missing from round " +
                                 std::to_string(r));
        }
    }
    return out;
}

}  // namespace preflab
