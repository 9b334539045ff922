#pragma once

// Word embeddings (GloVe training, text load/save) and SIF sentence embeddings
// with first-principal-component removal.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "polar/corpus.hpp"
#include "polar/csv.hpp"
#include "polar/error.hpp"
#include "polar/linalg.hpp"
#include "polar/rng.hpp"
#include "polar/textprep.hpp"

namespace polar {

/// Stem -> dense vector, all of one dimension. Insertion order is kept.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return words_.size(); }
    bool empty() const { return words_.empty(); }
    const std::vector<std::string>& words() const { return words_; }
    bool contains(const std::string& w) const { return index_.count(w) > 0; }

    std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

    std::optional<std::span<const double>> find(const std::string& w) const {
        auto it = index_.find(w);
        if (it == index_.end()) return std::nullopt;
        return (*this)[it->second];
    }

    std::span<const double> at(const std::string& w) const {
        auto v = find(w);
        if (!v) throw PreconditionError("no embedding for '" + w + "'");
        return *v;
    }

    void add(const std::string& w, std::span<const double> v) {
        if (words_.empty() && dim_ == 0) dim_ = v.size();
        if (v.size() != dim_) throw PreconditionError("embedding for '" + w + "' has the wrong dimension");
        for (double x : v)
            if (!std::isfinite(x)) throw NumericError("embedding for '" + w + "' is not finite");
        if (!index_.emplace(w, words_.size()).second) throw PreconditionError("duplicate embedding for '" + w + "'");
        words_.push_back(w);
        data_.insert(data_.end(), v.begin(), v.end());
    }

private:
    std::size_t dim_ = 0;
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> data_;
};

/// Text format: one "stem v1 ... vdim" line per entry.
inline void save_embeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << table.words()[i];
        for (double x : table[i]) out << ' ' << csv::fmt(x);
        out << '\n';
    }
}

inline EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    EmbeddingTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream ss(line);
        std::string word, tok;
        ss >> word;
        std::vector<double> v;
        while (ss >> tok) {
            try {
                v.push_back(csv::parse_double(tok));
            } catch (const Error&) {
                throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + tok + "'");
            }
        }
        if (v.empty()) throw IoError(path.string() + ":" + std::to_string(lineno) + ": no vector values");
        if (!table.empty() && v.size() != table.dim())
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": dimension " + std::to_string(v.size()) +
                          ", expected " + std::to_string(table.dim()));
        try {
            table.add(word, v);
        } catch (const Error& e) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (table.empty()) throw IoError(path.string() + ": no embeddings");
    return table;
}

// ---------------------------------------------------------------------------
// GloVe

struct GloveOptions {
    std::size_t dim = 100;
    std::size_t window = 5;
    double x_max = 100.0;
    double alpha = 0.75;
    std::size_t iters = 25;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;
    unsigned jobs = 1;  // > 1: lock-free parallel updates, not reproducible
};

struct Cooccurrence {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    double x = 0.0;
};

/// Symmetric co-occurrence counts over in-vocabulary stem sequences. A pair
/// at distance k within `window` adds 1/k in both directions.
inline std::vector<Cooccurrence> cooccurrences(const std::vector<std::vector<std::uint32_t>>& docs,
                                               std::size_t window) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> acc;
    for (const auto& d : docs)
        for (std::size_t a = 0; a < d.size(); ++a)
            for (std::size_t k = 1; k <= window && k <= a; ++k) {
                const double w = 1.0 / static_cast<double>(k);
                acc[{d[a], d[a - k]}] += w;
                acc[{d[a - k], d[a]}] += w;
            }
    std::vector<Cooccurrence> out;
    out.reserve(acc.size());
    for (const auto& [key, x] : acc) out.push_back({key.first, key.second, x});
    return out;
}

struct GloveResult {
    EmbeddingTable table;              // word + context vectors
    std::vector<double> loss_history;  // objective at init, then after each epoch
    std::vector<std::string> excluded; // vocabulary stems that never occur
    std::size_t cooccurrence_pairs = 0;
};

namespace detail {

template <bool Atomic>
struct Slot {
    static double load(double& x) {
        if constexpr (Atomic) return std::atomic_ref<double>(x).load(std::memory_order_relaxed);
        else return x;
    }
    static void store(double& x, double v) {
        if constexpr (Atomic) std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
        else x = v;
    }
};

struct GloveParams {
    std::size_t n = 0, dim = 0;
    std::vector<double> w, c, bw, bc, gw, gc, gbw, gbc;
};

inline double glove_objective(const GloveParams& p, const std::vector<Cooccurrence>& co, const GloveOptions& o) {
    double j = 0.0;
    for (const auto& e : co) {
        double diff = p.bw[e.i] + p.bc[e.j] - std::log(e.x);
        for (std::size_t d = 0; d < p.dim; ++d) diff += p.w[e.i * p.dim + d] * p.c[e.j * p.dim + d];
        const double f = e.x < o.x_max ? std::pow(e.x / o.x_max, o.alpha) : 1.0;
        j += 0.5 * f * diff * diff;
    }
    return j;
}

template <bool Atomic>
void glove_pass(GloveParams& p, const std::vector<Cooccurrence>& co, const std::vector<std::size_t>& order,
                std::size_t begin, std::size_t end, const GloveOptions& o) {
    using S = Slot<Atomic>;
    const std::size_t dim = p.dim;
    std::vector<double> wi(dim), cj(dim);
    for (std::size_t k = begin; k < end; ++k) {
        const auto& e = co[order[k]];
        double* w = p.w.data() + e.i * dim;
        double* c = p.c.data() + e.j * dim;
        double* gw = p.gw.data() + e.i * dim;
        double* gc = p.gc.data() + e.j * dim;
        double diff = S::load(p.bw[e.i]) + S::load(p.bc[e.j]) - std::log(e.x);
        for (std::size_t d = 0; d < dim; ++d) {
            wi[d] = S::load(w[d]);
            cj[d] = S::load(c[d]);
            diff += wi[d] * cj[d];
        }
        const double f = e.x < o.x_max ? std::pow(e.x / o.x_max, o.alpha) : 1.0;
        const double fdiff = f * diff;
        if (!std::isfinite(fdiff)) continue;
        for (std::size_t d = 0; d < dim; ++d) {
            const double g1 = fdiff * cj[d];
            const double g2 = fdiff * wi[d];
            const double s1 = S::load(gw[d]), s2 = S::load(gc[d]);
            S::store(w[d], wi[d] - o.learning_rate * g1 / std::sqrt(s1));
            S::store(c[d], cj[d] - o.learning_rate * g2 / std::sqrt(s2));
            S::store(gw[d], s1 + g1 * g1);
            S::store(gc[d], s2 + g2 * g2);
        }
        const double sb1 = S::load(p.gbw[e.i]), sb2 = S::load(p.gbc[e.j]);
        S::store(p.bw[e.i], S::load(p.bw[e.i]) - o.learning_rate * fdiff / std::sqrt(sb1));
        S::store(p.bc[e.j], S::load(p.bc[e.j]) - o.learning_rate * fdiff / std::sqrt(sb2));
        S::store(p.gbw[e.i], sb1 + fdiff * fdiff);
        S::store(p.gbc[e.j], sb2 + fdiff * fdiff);
    }
}

}  // namespace detail

/// Trains GloVe vectors for the vocabulary stems over the tweets.
///
/// Parameters (word, context vectors and biases) start uniform in
/// [-0.5/dim, 0.5/dim) from Rng(seed); AdaGrad accumulators start at 1. Each
/// epoch visits the co-occurrence entries in a fresh seeded order and updates
/// by f(X)(w.c + b + b~ - log X) with f(x) = min(1, (x/x_max)^alpha). The
/// returned vectors are w + c. iters = 0 returns the initialization.
inline GloveResult train_glove(const std::vector<TweetRecord>& tweets, const Vocab& vocab, const Preprocessor& pre,
                               const GloveOptions& o) {
    if (vocab.empty()) throw PreconditionError("train_glove: empty vocabulary");
    if (o.dim < 2) throw PreconditionError("train_glove: dim must be >= 2");
    if (o.window < 1) throw PreconditionError("train_glove: window must be >= 1");
    if (!(o.x_max > 0.0) || !(o.learning_rate > 0.0)) throw PreconditionError("train_glove: bad hyperparameters");

    std::vector<std::vector<std::uint32_t>> docs;
    std::vector<std::int64_t> occurrences(vocab.size(), 0);
    for (const auto& t : tweets) {
        std::vector<std::uint32_t> d;
        for (const auto& s : pre.stems(t.text))
            if (auto j = vocab.find(s)) {
                d.push_back(static_cast<std::uint32_t>(*j));
                ++occurrences[*j];
            }
        if (!d.empty()) docs.push_back(std::move(d));
    }
    GloveResult res;
    std::vector<std::uint32_t> compact(vocab.size(), 0);
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < vocab.size(); ++j) {
        if (occurrences[j] == 0) {
            res.excluded.push_back(vocab[j]);
            continue;
        }
        compact[j] = static_cast<std::uint32_t>(members.size());
        members.push_back(j);
    }
    if (members.empty()) throw PreconditionError("train_glove: no vocabulary stem occurs in the tweets");
    for (auto& d : docs)
        for (auto& x : d) x = compact[x];
    const auto co = cooccurrences(docs, o.window);
    res.cooccurrence_pairs = co.size();

    detail::GloveParams p;
    p.n = members.size();
    p.dim = o.dim;
    Rng rng(o.seed);
    const double half = 0.5 / static_cast<double>(o.dim);
    auto init = [&](std::vector<double>& v, std::size_t n) {
        v.resize(n);
        for (auto& x : v) x = rng.uniform(-half, half);
    };
    init(p.w, p.n * p.dim);
    init(p.c, p.n * p.dim);
    init(p.bw, p.n);
    init(p.bc, p.n);
    p.gw.assign(p.n * p.dim, 1.0);
    p.gc.assign(p.n * p.dim, 1.0);
    p.gbw.assign(p.n, 1.0);
    p.gbc.assign(p.n, 1.0);

    res.loss_history.push_back(detail::glove_objective(p, co, o));
    std::vector<std::size_t> order(co.size());
    for (std::size_t epoch = 0; epoch < o.iters; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle_rng(o.seed, epoch + 1);
        shuffle_rng.shuffle(order);
        const unsigned jobs = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(co.size())));
        if (jobs <= 1) {
            detail::glove_pass<false>(p, co, order, 0, co.size(), o);
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (co.size() + jobs - 1) / jobs;
            for (unsigned t = 0; t < jobs; ++t) {
                const std::size_t b = std::min(co.size(), t * chunk), e = std::min(co.size(), b + chunk);
                pool.emplace_back([&, b, e] { detail::glove_pass<true>(p, co, order, b, e, o); });
            }
            for (auto& th : pool) th.join();
        }
        res.loss_history.push_back(detail::glove_objective(p, co, o));
    }

    res.table = EmbeddingTable(o.dim);
    std::vector<double> v(o.dim);
    for (std::size_t m = 0; m < members.size(); ++m) {
        for (std::size_t d = 0; d < o.dim; ++d) v[d] = p.w[m * o.dim + d] + p.c[m * o.dim + d];
        res.table.add(vocab[members[m]], v);
    }
    return res;
}

// ---------------------------------------------------------------------------
// SIF sentence embeddings

/// weight(s) = 1 / count of s over the sample tweets. Vocabulary stems that
/// never occur get no weight.
inline std::map<std::string, double> sif_weights(const std::vector<TweetRecord>& samples, const Vocab& vocab,
                                                 const Preprocessor& pre) {
    std::vector<std::int64_t> counts(vocab.size(), 0);
    for (const auto& t : samples)
        for (const auto& s : pre.stems(t.text))
            if (auto j = vocab.find(s)) ++counts[*j];
    std::map<std::string, double> out;
    for (std::size_t j = 0; j < vocab.size(); ++j)
        if (counts[j] > 0) out.emplace(vocab[j], 1.0 / static_cast<double>(counts[j]));
    return out;
}

/// Dominant right singular vector of `rows` (no centering), by power
/// iteration on A^T A started from the largest-norm row. Iterates until
/// successive unit vectors differ by at most 1e-12; the first entry with
/// magnitude above 1e-12 is made positive.
inline std::vector<double> first_principal_component(const Matrix& rows) {
    if (rows.rows() < 2) throw PreconditionError("first_principal_component: need at least two rows");
    const std::size_t n = rows.rows(), d = rows.cols();
    bool identical = true;
    for (std::size_t i = 1; i < n && identical; ++i)
        for (std::size_t c = 0; c < d && identical; ++c) identical = rows(i, c) == rows(0, c);
    if (identical) throw PreconditionError("first_principal_component: all rows are identical");

    Matrix g(d, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a) {
            const double x = rows(i, a);
            if (x == 0.0) continue;
            for (std::size_t b = 0; b < d; ++b) g(a, b) += x * rows(i, b);
        }
    std::size_t start = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double nr = norm(rows.row(i));
        if (nr > best) {
            best = nr;
            start = i;
        }
    }
    if (!(best > 0.0)) throw PreconditionError("first_principal_component: zero matrix");
    std::vector<double> v(rows.row(start).begin(), rows.row(start).end()), next(d);
    for (double& x : v) x /= best;

    constexpr std::size_t max_iters = 200000;
    bool converged = false;
    for (std::size_t it = 0; it < max_iters; ++it) {
        for (std::size_t a = 0; a < d; ++a) next[a] = dot(g.row(a), v);
        const double nn = norm(next);
        if (!(nn > 0.0)) throw NumericError("first_principal_component: iteration collapsed to zero");
        double change = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            next[a] /= nn;
            change += (next[a] - v[a]) * (next[a] - v[a]);
        }
        v.swap(next);
        if (std::sqrt(change) <= 1e-12) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NumericError("first_principal_component: power iteration did not converge");
    for (double x : v)
        if (std::abs(x) > 1e-12) {
            if (x < 0.0)
                for (double& y : v) y = -y;
            break;
        }
    return v;
}

/// v - (v . u) u for unit u.
inline std::vector<double> remove_component(std::span<const double> v, std::span<const double> u) {
    const double p = dot(v, u);
    std::vector<double> out(v.begin(), v.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= p * u[i];
    return out;
}

struct SentenceEmbedding {
    std::string tweet_id;
    std::vector<double> v;  // weighted average
    std::vector<double> e;  // v with the pc1 projection removed
    bool embeddable = false;
};

/// Weighted average of the word vectors of the tweet's stems (those with both
/// a weight and an embedding); empty when there are none.
inline std::vector<double> sif_average(const std::vector<std::string>& stems, const EmbeddingTable& table,
                                       const std::map<std::string, double>& weights) {
    std::vector<double> v(table.dim(), 0.0);
    double wsum = 0.0;
    for (const auto& s : stems) {
        auto w = weights.find(s);
        if (w == weights.end()) continue;
        auto vec = table.find(s);
        if (!vec) continue;
        for (std::size_t d = 0; d < v.size(); ++d) v[d] += w->second * (*vec)[d];
        wsum += w->second;
    }
    if (!(wsum > 0.0)) return {};
    for (double& x : v) x /= wsum;
    return v;
}

/// SIF embeddings of the tweets. With `pc1` absent, the component is computed
/// from these tweets' averages. Tweets with no weighted in-table stems, or
/// whose embedding is exactly zero after removal, are marked unembeddable.
inline std::vector<SentenceEmbedding> sif_embed(const std::vector<TweetRecord>& tweets, const EmbeddingTable& table,
                                                const std::map<std::string, double>& weights,
                                                const Preprocessor& pre,
                                                std::optional<std::vector<double>> pc1 = std::nullopt) {
    std::vector<SentenceEmbedding> out;
    out.reserve(tweets.size());
    for (const auto& t : tweets) {
        SentenceEmbedding s;
        s.tweet_id = t.tweet_id;
        s.v = sif_average(pre.stems(t.text), table, weights);
        out.push_back(std::move(s));
    }
    if (!pc1) {
        Matrix rows;
        for (const auto& s : out)
            if (!s.v.empty()) rows.append_row(s.v);
        pc1 = first_principal_component(rows);
    }
    if (pc1->size() != table.dim()) throw PreconditionError("sif_embed: pc1 dimension differs from the table");
    for (auto& s : out) {
        if (s.v.empty()) continue;
        s.e = remove_component(s.v, *pc1);
        s.embeddable = norm(s.e) > 0.0;
    }
    return out;
}

/// Sample averages -> pc1, for applying one component to a larger set.
inline std::vector<double> sif_component(const std::vector<TweetRecord>& samples, const EmbeddingTable& table,
                                         const std::map<std::string, double>& weights, const Preprocessor& pre) {
    Matrix rows;
    for (const auto& t : samples) {
        auto v = sif_average(pre.stems(t.text), table, weights);
        if (!v.empty()) rows.append_row(v);
    }
    return first_principal_component(rows);
}

}  // namespace polar
