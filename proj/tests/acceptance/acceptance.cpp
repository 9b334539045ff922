// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <unistd.h>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "polar/polar.hpp"

namespace fs = std::filesystem;
using namespace polar;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

GenerativeSpec two_token_spec(std::uint64_t seed) {
    GenerativeSpec s;
    s.phi_dem = {0.6, 0.4};
    s.phi_rep = {0.4, 0.6};
    s.n_dem = s.n_rep = 200;
    s.tokens_per_user = 100;
    s.seed = seed;
    return s;
}

Outcome estimator_consistency() {
    const auto t0 = Clock::now();
    double abs_err = 0.0, mean = 0.0;
    const double truth = true_partisanship(two_token_spec(0));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const double est = leave_out(generate(two_token_spec(seed)).counts).pi_lo;
        abs_err += std::abs(est - truth) / 10.0;
        mean += est / 10.0;
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = std::abs(truth - 0.52) < 1e-15 && abs_err <= 0.01 && secs <= 10.0;
    o.detail = "truth=" + num(truth) + " mean=" + num(mean) + " mean|err|=" + num(abs_err) + " time=" + num(secs) + "s";
    return o;
}

Outcome null_calibration() {
    const auto counts = generate(two_token_spec(1)).counts;
    const auto base = random_assignment_baseline(counts, 20, 99);
    const double m = stats::mean(base);
    return {base.size() == 20 && std::abs(m - 0.5) <= 0.005, "mean over 20 shuffles=" + num(m)};
}

Outcome brute_force() {
    double worst = 0.0;
    std::size_t cases = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const std::size_t users = 4 + rng.below(17);
        const auto counts = oracle::random_counts(rng, users, 50);
        const auto fast = try_leave_out(counts);
        if (!fast) continue;
        worst = std::max(worst, std::abs(fast->pi_lo - oracle::naive_leave_out(counts)));
        ++cases;
    }
    return {cases == 100 && worst <= 1e-12, num(cases) + " corpora, max |diff|=" + num(worst)};
}

struct Decomposition {
    double within, between;
};

Decomposition decompose(const std::vector<double>& pd, const std::vector<double>& pr, std::uint64_t seed) {
    GenerativeSpec s;
    s.phi_dem = pd;
    s.phi_rep = pr;
    s.n_dem = s.n_rep = 200;
    s.tokens_per_user = 120;
    s.tokens_per_tweet = 6;
    s.topic_of_token = std::vector<std::size_t>{0, 0, 0, 0, 1, 1, 1, 1};
    s.seed = seed;
    const auto g = generate(s);
    std::map<std::string, std::size_t> topic_of;
    for (std::size_t i = 0; i < g.tweets.size(); ++i) topic_of[g.tweets[i].tweet_id] = g.tweet_topics[i];
    const Preprocessor pre(std::unordered_set<std::string>{});
    const Vocab vocab(g.token_names);
    const auto w = within_topic_partisanship(g.tweets, topic_of, g.labels, vocab, pre);
    const auto b = between_topic_partisanship(g.tweets, topic_of, g.labels, 2);
    return {w.overall, b.pi_lo};
}

Outcome decomposition() {
    // parties differ only in how much they talk about each topic
    const std::vector<double> prop_d = {0.175, 0.175, 0.175, 0.175, 0.075, 0.075, 0.075, 0.075};
    const std::vector<double> prop_r = {0.075, 0.075, 0.075, 0.075, 0.175, 0.175, 0.175, 0.175};
    // same topic shares, different words inside each topic
    const std::vector<double> word_d = {0.2, 0.15, 0.1, 0.05, 0.2, 0.15, 0.1, 0.05};
    const std::vector<double> word_r = {0.05, 0.1, 0.15, 0.2, 0.05, 0.1, 0.15, 0.2};
    Outcome o;
    double min_between = 1, max_within_dev = 0, min_within = 1, max_between_dev = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto a = decompose(prop_d, prop_r, seed);
        min_between = std::min(min_between, a.between);
        max_within_dev = std::max(max_within_dev, std::abs(a.within - 0.5));
        const auto b = decompose(word_d, word_r, 100 + seed);
        min_within = std::min(min_within, b.within);
        max_between_dev = std::max(max_between_dev, std::abs(b.between - 0.5));
    }
    o.pass = min_between > 0.52 && max_within_dev <= 0.01 && min_within > 0.52 && max_between_dev <= 0.01;
    o.detail = "proportion-only: min between=" + num(min_between) + " max|within-.5|=" + num(max_within_dev) +
               "; word-only: min within=" + num(min_within) + " max|between-.5|=" + num(max_between_dev);
    return o;
}

Outcome kmeans_recovery() {
    double worst_ari = 1.0;
    bool monotone = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed, 17);
        const std::size_t d = 10, per = 100;
        const double spread = 0.1 / std::sqrt(static_cast<double>(d));  // RMS radius 0.1
        Matrix x;
        std::vector<std::size_t> truth;
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < per; ++i) {
                std::vector<double> p(d, 0.0);
                p[c] = 1.0;
                for (double& v : p) v += spread * rng.normal();
                x.append_row(p);
                truth.push_back(c);
            }
        const auto model = kmeans_cosine(x, 3, seed);
        std::vector<std::size_t> got;
        for (std::size_t i = 0; i < x.rows(); ++i) got.push_back(assign_topic("", x.row(i), model).topic);
        worst_ari = std::min(worst_ari, oracle::ari(truth, got));
        for (std::size_t i = 1; i < model.objective_history.size(); ++i)
            monotone = monotone && model.objective_history[i] <= model.objective_history[i - 1];
    }
    return {worst_ari >= 0.99 && monotone,
            "min ARI over 20 seeds=" + num(worst_ari) + ", objective non-increasing=" + (monotone ? "yes" : "no")};
}

Outcome sif_orthogonality() {
    double worst_ratio = 0.0, worst_pc = 0.0;
    std::size_t embedded = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed, 5);
        Matrix a;
        for (std::size_t i = 0; i < 40; ++i) {
            std::vector<double> r(8);
            for (double& v : r) v = rng.normal() + (i % 3 == 0 ? 1.5 : 0.0);
            a.append_row(r);
        }
        const auto pc = first_principal_component(a);
        const auto ref = oracle::pc1(a);
        for (std::size_t j = 0; j < pc.size(); ++j) worst_pc = std::max(worst_pc, std::abs(pc[j] - ref[j]));
    }
    // sentence embeddings over a random vocabulary
    Rng rng(3);
    const std::size_t dim = 12;
    EmbeddingTable by_stem(dim);
    std::vector<std::string> words;
    const Preprocessor pre(std::unordered_set<std::string>{});
    for (std::size_t w = 0; by_stem.size() < 60; ++w) {
        const std::string word = "tok" + std::string(1, static_cast<char>('a' + w % 26)) +
                                 std::string(1, static_cast<char>('a' + w / 26)) + "z";
        const auto st = pre.stems(word);
        if (st.size() != 1 || by_stem.contains(st[0])) continue;
        std::vector<double> v(dim);
        for (double& x : v) x = rng.normal() + 0.8;
        by_stem.add(st[0], v);
        words.push_back(word);
    }
    std::vector<TweetRecord> tweets;
    for (std::size_t t = 0; t < 300; ++t) {
        TweetRecord r;
        r.tweet_id = "t" + std::to_string(t);
        r.user_id = "u";
        r.event_id = "e";
        const std::size_t len = 1 + rng.below(10);
        for (std::size_t i = 0; i < len; ++i) r.text += words[rng.below(words.size())] + " ";
        tweets.push_back(r);
    }
    const Vocab vocab(by_stem.words());
    const auto weights = sif_weights(tweets, vocab, pre);
    const auto pc1 = sif_component(tweets, by_stem, weights, pre);
    for (const auto& e : sif_embed(tweets, by_stem, weights, pre, pc1)) {
        if (!e.embeddable) continue;
        ++embedded;
        worst_ratio = std::max(worst_ratio, std::abs(dot(e.e, pc1)) / norm(e.e));
    }
    return {embedded > 0 && worst_ratio <= 1e-8 && worst_pc <= 1e-8,
            num(embedded) + " sentences, max |e.pc1|/|e|=" + num(worst_ratio) +
                "; max |pc1 - dense eigenvector| over 10 matrices=" + num(worst_pc)};
}

Outcome log_odds_algebra() {
    Rng rng(2024);
    double worst_anti = 0.0, worst_sym = 0.0;
    bool monotone = true;
    for (int i = 0; i < 10000; ++i) {
        const std::int64_t nd = 1 + static_cast<std::int64_t>(rng.below(5000));
        const std::int64_t nr = 1 + static_cast<std::int64_t>(rng.below(5000));
        const std::int64_t fd = static_cast<std::int64_t>(rng.below(nd + 1));
        const std::int64_t fr = static_cast<std::int64_t>(rng.below(nr));  // leaves room for f_R + 1
        const std::size_t v = 1 + rng.below(1000);
        const double alpha = 0.001 + rng.uniform();
        const auto a = log_odds("x", fd, fr, nd, nr, v, alpha);
        const auto b = log_odds("x", fr, fd, nr, nd, v, alpha);
        worst_anti = std::max({worst_anti, std::abs(a.delta + b.delta), std::abs(a.z + b.z)});
        worst_sym = std::max(worst_sym, std::abs(log_odds("x", fd, fd, nd, nd, v, alpha).delta));
        monotone = monotone && log_odds("x", fd, fr + 1, nd, nr, v, alpha).delta > a.delta;
    }
    return {worst_anti <= 1e-12 && worst_sym <= 1e-12 && monotone,
            "10000 tables: max antisymmetry error=" + num(worst_anti) + ", max symmetric |delta|=" + num(worst_sym) +
                ", increasing in f_R=" + (monotone ? "yes" : "no")};
}

Outcome modal_identity() {
    Rng rng(77);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t k = 2 + rng.below(12);
        std::map<std::size_t, std::int64_t> f, fm;
        for (std::size_t x = 0; x < k; ++x) {
            f[x] = static_cast<std::int64_t>(rng.below(500));
            fm[x] = f[x] == 0 ? 0 : static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(f[x]) + 1));
        }
        fm[0] += 1;
        f[0] += 1;
        const auto r = modal_representation("m", f, fm);
        double total = 0.0;
        for (const auto& [x, c] : f) total += static_cast<double>(c);
        double s = 0.0;
        for (const auto& [x, p] : r.per_topic) s += p * static_cast<double>(f.at(x)) / total;
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return {worst <= 1e-12, "1000 configurations, max |sum - 1|=" + num(worst)};
}

Outcome stats_oracle() {
    double worst_p = 0.0, worst_scale = 0.0;
    for (std::uint64_t c = 0; c < 50; ++c) {
        Rng rng(c, 9);
        const std::size_t na = 3 + rng.below(30), nb = 3 + rng.below(30);
        std::vector<double> a(na), b(nb);
        for (double& v : a) v = rng.normal() * (1 + c % 4) + 0.3;
        for (double& v : b) v = rng.normal() * (1 + c % 3);
        const auto os = stats::one_sample_ttest(a, 0.1);
        const auto ow = stats::two_sample_ttest(a, b);
        const auto op = stats::two_sample_ttest(a, b, true);
        worst_p = std::max({worst_p, std::abs(os.p - oracle::one_sample(a, 0.1).p),
                            std::abs(ow.p - oracle::welch(a, b).p), std::abs(op.p - oracle::pooled(a, b).p)});

        const std::size_t n = 12 + rng.below(40), p = 2 + rng.below(4);
        Matrix x(n, p);
        Eigen::MatrixXd ex(n, p);
        Eigen::VectorXd ey(n), ew(n);
        std::vector<double> y(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            double yi = 0.5;
            for (std::size_t j = 0; j < p; ++j) {
                x(i, j) = ex(i, j) = j == 0 ? 1.0 : rng.normal();
                yi += 0.3 * static_cast<double>(j) * x(i, j);
            }
            y[i] = ey[i] = yi + rng.normal();
            w[i] = ew[i] = 0.2 + rng.uniform();
        }
        std::vector<std::string> names;
        for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
        const auto fit = stats::ols(y, x, std::nullopt, names);
        const auto ref = oracle::wls(ey, ex, Eigen::VectorXd::Ones(n));
        const auto wfit = stats::ols(y, x, std::span<const double>(w), names);
        const auto wref = oracle::wls(ey, ex, ew);
        std::vector<double> w3(w);
        for (double& v : w3) v *= 3.7;
        const auto sfit = stats::ols(y, x, std::span<const double>(w3), names);
        for (std::size_t j = 0; j < p; ++j) {
            worst_p = std::max({worst_p, std::abs(fit.p_values[j] - ref.p[j]), std::abs(wfit.p_values[j] - wref.p[j])});
            worst_scale = std::max({worst_scale, std::abs(sfit.coefficients[j] - wfit.coefficients[j]),
                                    std::abs(sfit.std_errors[j] - wfit.std_errors[j]),
                                    std::abs(sfit.p_values[j] - wfit.p_values[j])});
        }
    }
    return {worst_p <= 1e-8 && worst_scale <= 1e-10,
            "50 cases: max |p - oracle p|=" + num(worst_p) + ", max change under weight scaling=" + num(worst_scale)};
}

Outcome stemmer_reference() {
    std::ifstream in(POLAR_TEST_DATA_DIR "/snowball_english_sample.tsv");
    std::string line;
    std::size_t total = 0, ok = 0;
    std::string first_bad;
    while (std::getline(in, line)) {
        const auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        ++total;
        const std::string word = line.substr(0, tab), want = line.substr(tab + 1);
        if (porter2::stem(word) == want) ++ok;
        else if (first_bad.empty()) first_bad = word;
    }
    return {total == 200 && ok == total,
            num(ok) + "/" + num(total) + " match" + (first_bad.empty() ? "" : ", first mismatch: " + first_bad)};
}

int run_stage(const std::string& stage, const fs::path& out, unsigned jobs) {
    const std::string cmd = std::string("\"") + POLAR_CLI_PATH + "\" " + stage + " --config \"" + POLAR_SOURCE_DIR +
                            "/demo/toy.conf\" --out \"" + out.string() + "\" --jobs " + std::to_string(jobs) +
                            " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        out[fs::relative(e.path(), dir).string()] = s.str();
    }
    return out;
}

Outcome end_to_end_determinism() {
    const auto t0 = Clock::now();
    const fs::path root = fs::temp_directory_path() / ("polar_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::vector<std::string> stages = {"ingest", "vocab", "polarize", "topics", "affect", "devices", "report"};
    std::string failed;
    for (const auto& [name, jobs] : std::vector<std::pair<std::string, unsigned>>{{"a", 1}, {"b", 2}})
        for (const auto& s : stages)
            if (run_stage(s, root / name, jobs) != 0 && failed.empty()) failed = s + " (run " + name + ")";
    const double secs = seconds_since(t0);
    if (!failed.empty()) {
        fs::remove_all(root);
        return {false, "stage failed: " + failed};
    }
    const auto a = snapshot(root / "a"), b = snapshot(root / "b");
    fs::remove_all(root);
    std::string diff;
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        if ((it == b.end() || it->second != v) && diff.empty()) diff = k;
    }
    const bool same = diff.empty() && a.size() == b.size();
    return {same && a.size() > 20 && secs <= 300.0,
            num(a.size()) + " files, byte-identical=" + (same ? "yes" : "no (" + diff + ")") +
                ", two full runs took " + num(secs) + "s"};
}

Outcome grounding_example() {
    const auto contexts = load_context_events(data_path("context_events.csv"));
    const std::string tweet =
        "Dozens of preventable deaths should not be the cost of living in America. Stand up to the #NRA. "
        "#LasVegasShooting #SandyHook #Charleston";
    auto got = context_mentions(tweet, contexts, "las_vegas");
    std::sort(got.begin(), got.end());
    std::string list;
    for (const auto& g : got) list += (list.empty() ? "" : ", ") + g;
    return {got == std::vector<std::string>{"Charleston", "Sandy Hook"}, "context events: {" + list + "}"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"estimator consistency", estimator_consistency},
        {"null calibration", null_calibration},
        {"brute-force equivalence", brute_force},
        {"within/between decomposition", decomposition},
        {"k-means recovery", kmeans_recovery},
        {"SIF orthogonality and pc1", sif_orthogonality},
        {"log-odds algebra", log_odds_algebra},
        {"modal representation identity", modal_identity},
        {"t-test and OLS oracle", stats_oracle},
        {"stemmer reference vectors", stemmer_reference},
        {"end-to-end determinism", end_to_end_determinism},
        {"grounding worked example", grounding_example},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << (i + 1) << " " << criteria[i].first << ": "
                  << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failures == 0 ? 0 : 1;
}
