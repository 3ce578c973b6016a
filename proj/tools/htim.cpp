/*
 * Copyright 2026 The HTIM Toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// htim: command-line driver for the hybrid text + interaction pipeline.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "htim/common.hpp"
#include "htim/corpus.hpp"
#include "htim/embeddings.hpp"
#include "htim/fusion.hpp"
#include "htim/pipeline.hpp"
#include "htim/svm.hpp"
#include "htim/tokenizer.hpp"
#include "htim/tsne.hpp"
#include "htim/word2vec.hpp"

namespace fs = std::filesystem;
using namespace htim;

namespace {

struct Globals {
    int threads = 1;
    std::uint64_t seed = 42;
};

std::string env_name(const std::string& flag) {
    std::string e = "HTIM_";
    for (char c : flag) e += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return e;
}

template <class T>
CLI::Option* flag_opt(CLI::App* app, const std::string& name, T& var, const std::string& desc) {
    return app->add_option("--" + name, var, desc)->envname(env_name(name))->capture_default_str();
}

corpus::RegionDataset load_dir(const fs::path& dir) {
    const auto paths = corpus::RegionPaths::in_dir(dir);
    for (const auto& p : {paths.labels, paths.tweets, paths.retweets, paths.follows})
        if (!fs::exists(p))
            throw DataError("missing " + p.string() + "; run `htim synth --out " + dir.string() +
                            "` or `htim ingest --out " + dir.string() + "` first");
    return corpus::load_region(paths);
}

void require_file(const fs::path& p, const std::string& producer) {
    if (!fs::exists(p)) throw DataError("missing " + p.string() + "; produce it with `htim " + producer + "`");
}

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// Options shared by every command that builds features.
struct FeatureOpts {
    fs::path in = "data";
    std::string method = "re";
    std::string level;
    std::size_t text_dim = 300;
    std::size_t graph_dim = 20;
    int walks_per_node = 10;
    int walk_length = 80;
    int window = 10;
    int walk_epochs = 1;
    double p = 1.0;
    double q = 0.5;
    int re_epochs = 5;
    std::string re_output = "source";
    fs::path tokens;
    bool normalize = false;
    bool no_filter = false;

    void add(CLI::App* app) {
        flag_opt(app, "in", in, "Region directory (labels.csv, tweets.jsonl, retweets.tsv, follows.tsv)");
        flag_opt(app, "method", method,
                 "Feature method: [re|dw|n2v][+tfidf|+w2v|+ctx-sos|+ctx-avg|+ctx-max], a text featurizer alone, "
                 "or a baseline (majority|random)");
        flag_opt(app, "level", level, "Fusion level: user|tweet (default follows the text featurizer)");
        flag_opt(app, "text-dim", text_dim, "Text feature dimension (tf-idf vocabulary size or word2vec size)");
        flag_opt(app, "graph-dim", graph_dim, "Interaction embedding dimension");
        flag_opt(app, "walks-per-node", walks_per_node, "Random walks started per node (dw, n2v)");
        flag_opt(app, "walk-length", walk_length, "Nodes per random walk (dw, n2v)");
        flag_opt(app, "window", window, "Skip-gram window over walks (dw, n2v)");
        flag_opt(app, "walk-epochs", walk_epochs, "Skip-gram epochs over the walk corpus (dw, n2v)");
        flag_opt(app, "p", p, "node2vec return parameter");
        flag_opt(app, "q", q, "node2vec in-out parameter");
        flag_opt(app, "re-epochs", re_epochs, "Passes over the retweet edges (re)");
        flag_opt(app, "re-output", re_output, "Relational table exported: source|target|average")
            ->check(CLI::IsMember({"source", "target", "average"}));
        flag_opt(app, "tokens", tokens, "Contextual token-vector JSONL (required by ctx-* featurizers)");
        app->add_flag("--normalize-segments", normalize, "L2-normalize each fused segment")
            ->envname("HTIM_NORMALIZE_SEGMENTS");
        app->add_flag("--no-filter", no_filter, "Skip the short-tweet filter and per-tier quotas")
            ->envname("HTIM_NO_FILTER");
    }

    pipeline::RunConfig config(const Globals& g) const {
        pipeline::RunConfig c;
        c.region = in.string();
        c.set_method(method);
        c.text_dim = text_dim;
        c.graph_dim = graph_dim;
        c.walks.walks_per_node = walks_per_node;
        c.walks.walk_length = walk_length;
        c.walks.window = window;
        c.walks.epochs = walk_epochs;
        c.walks.p = p;
        c.walks.q = q;
        c.relational_epochs = re_epochs;
        c.relational_output = re_output == "target"    ? graph::RelationalOutput::Target
                              : re_output == "average" ? graph::RelationalOutput::Average
                                                       : graph::RelationalOutput::Source;
        if (level == "user")
            c.level = pipeline::FusionLevel::User;
        else if (level == "tweet")
            c.level = pipeline::FusionLevel::Tweet;
        else if (!level.empty())
            throw UsageError("--level must be user or tweet");
        c.contextual_tokens = tokens;
        c.normalize_segments = normalize;
        c.seed = g.seed;
        return c;
    }

    corpus::RegionDataset dataset() const {
        auto ds = load_dir(in);
        return no_filter ? ds : corpus::filter_and_quota(ds, corpus::default_quotas());
    }
};

struct KernelOpts {
    double C = 1.0;
    std::string gamma = "scale";
    std::string scheme = "ovo";
    bool standardize = false;

    void add(CLI::App* app) {
        flag_opt(app, "C", C, "SVM soft-margin penalty");
        flag_opt(app, "gamma", gamma, "RBF bandwidth: a positive number or 'scale'");
        flag_opt(app, "scheme", scheme, "Multi-class scheme: ovo|ovr")->check(CLI::IsMember({"ovo", "ovr"}));
        app->add_flag("--standardize", standardize, "Z-score features before training")
            ->envname("HTIM_STANDARDIZE");
    }

    model::KernelConfig config(std::uint64_t seed) const {
        model::KernelConfig k;
        k.C = C;
        if (gamma != "scale") {
            try {
                k.gamma = std::stod(gamma);
            } catch (const std::exception&) {
                throw UsageError("--gamma must be a number or 'scale'");
            }
        }
        k.scheme = scheme == "ovr" ? model::MultiClass::OneVsRest : model::MultiClass::OneVsOne;
        k.standardize = standardize;
        k.seed = seed;
        k.validate();
        return k;
    }
};

corpus::EngagementTier tier_arg(const std::string& s) {
    auto t = corpus::parse_tier(s);
    if (!t) throw UsageError("--tier must be member, supporter or sympathizer");
    return *t;
}

int run(int argc, char** argv) {
    CLI::App app{"htim: political leaning inference from tweet text and retweet interactions"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Read options from a TOML-style key = value file ([command] sections)");
    Globals g;
    app.add_option("--threads", g.threads, "Worker threads; 1 gives bit-reproducible output")
        ->envname("HTIM_THREADS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", g.seed, "Master random seed")->envname("HTIM_SEED")->capture_default_str();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Validate a region, drop short tweets and apply per-tier quotas");
    fs::path ingest_in, ingest_out = "data";
    std::size_t q_member = 120, q_supporter = 60, q_sympathizer = 60;
    ingest->add_option("--in", ingest_in, "Raw region directory")->required()->envname("HTIM_IN");
    flag_opt(ingest, "out", ingest_out, "Output region directory");
    flag_opt(ingest, "quota-member", q_member, "Most recent tweets kept per Member");
    flag_opt(ingest, "quota-supporter", q_supporter, "Most recent tweets kept per Supporter");
    flag_opt(ingest, "quota-sympathizer", q_sympathizer, "Most recent tweets kept per Sympathizer");

    // derive-tiers
    auto* derive = app.add_subcommand("derive-tiers", "Label Supporters and Sympathizers from follows of Members");
    fs::path derive_in = "data", derive_out;
    int sup_threshold = 5, sym_cap = 2;
    flag_opt(derive, "in", derive_in, "Region directory");
    flag_opt(derive, "out", derive_out, "Output region directory (default: overwrite --in)");
    flag_opt(derive, "supporter-threshold", sup_threshold, "Minimum Members of one party followed by a Supporter");
    flag_opt(derive, "sympathizer-cap", sym_cap, "Maximum Members of any party followed by a Sympathizer");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic region with planted party structure");
    corpus::SynthConfig sc;
    fs::path synth_out = "data";
    flag_opt(synth, "out", synth_out, "Output region directory");
    flag_opt(synth, "parties", sc.n_parties, "Number of parties");
    flag_opt(synth, "members", sc.members_per_party, "Members per party");
    flag_opt(synth, "supporters", sc.supporters_per_party, "Supporters per party");
    flag_opt(synth, "sympathizers", sc.sympathizers_per_party, "Sympathizers per party");
    flag_opt(synth, "interacting", sc.interacting_per_party, "Unlabeled interacting users per party");
    flag_opt(synth, "homophily", sc.homophily, "Probability a retweet targets the user's own party");
    flag_opt(synth, "specificity", sc.vocab_specificity, "Probability a Member token comes from party vocabulary");
    flag_opt(synth, "region", sc.region, "Region id written to labels.csv");

    // train-text
    auto* ttext = app.add_subcommand("train-text", "Fit a text featurizer and export its vectors");
    fs::path tt_in = "data", tt_out = "text_vectors.txt";
    std::string tt_featurizer = "tfidf";
    std::size_t tt_dim = 300;
    bool tt_no_filter = false;
    flag_opt(ttext, "in", tt_in, "Region directory");
    flag_opt(ttext, "featurizer", tt_featurizer, "tfidf (user vectors) or w2v (word table)")
        ->check(CLI::IsMember({"tfidf", "w2v"}));
    flag_opt(ttext, "dim", tt_dim, "Vector dimension");
    flag_opt(ttext, "out", tt_out, "Output table, `<count> <dim>` text format");
    ttext->add_flag("--no-filter", tt_no_filter, "Skip the short-tweet filter and quotas");

    // train-graph
    auto* tgraph = app.add_subcommand("train-graph", "Train interaction embeddings on the retweet graph");
    fs::path tg_in = "data", tg_out = "embeddings.txt";
    std::string tg_method = "re";
    std::size_t tg_dim = 20;
    graph::WalkConfig tg_walks = graph::WalkConfig::node2vec();
    int tg_re_epochs = 5;
    flag_opt(tgraph, "in", tg_in, "Region directory");
    flag_opt(tgraph, "method", tg_method, "dw|n2v|re")->check(CLI::IsMember({"dw", "n2v", "re"}));
    flag_opt(tgraph, "dim", tg_dim, "Embedding dimension");
    flag_opt(tgraph, "walks-per-node", tg_walks.walks_per_node, "Random walks started per node");
    flag_opt(tgraph, "walk-length", tg_walks.walk_length, "Nodes per walk");
    flag_opt(tgraph, "window", tg_walks.window, "Skip-gram window");
    flag_opt(tgraph, "walk-epochs", tg_walks.epochs, "Skip-gram epochs");
    flag_opt(tgraph, "p", tg_walks.p, "node2vec return parameter");
    flag_opt(tgraph, "q", tg_walks.q, "node2vec in-out parameter");
    flag_opt(tgraph, "re-epochs", tg_re_epochs, "Passes over retweet edges (re)");
    flag_opt(tgraph, "out", tg_out, "Output table, `<count> <dim>` text format");

    // fuse
    auto* fuse = app.add_subcommand("fuse", "Build hybrid feature vectors and dump them as CSV");
    FeatureOpts fuse_opts;
    fs::path fuse_out = "features.csv";
    fuse_opts.add(fuse);
    flag_opt(fuse, "out", fuse_out, "Output CSV `id,flag_text,flag_inter,f1..fd`");

    // train-model
    auto* tmodel = app.add_subcommand("train-model", "Train the RBF-SVM on fused features of one tier");
    fs::path tm_features = "features.csv", tm_in = "data", tm_out = "model.json";
    std::string tm_tier = "member";
    KernelOpts tm_kernel;
    flag_opt(tmodel, "features", tm_features, "Hybrid feature CSV from `htim fuse`");
    flag_opt(tmodel, "in", tm_in, "Region directory providing party labels");
    flag_opt(tmodel, "tier", tm_tier, "Tier whose users train the model");
    flag_opt(tmodel, "out", tm_out, "Model file (JSON)");
    tm_kernel.add(tmodel);

    // eval
    auto* evalc = app.add_subcommand("eval", "Cross-validate on Members or transfer to a lower tier");
    FeatureOpts ev_opts;
    KernelOpts ev_kernel;
    std::string ev_tier = "member";
    int ev_folds = 10;
    bool ev_mean_folds = false;
    fs::path ev_out = "report.json", ev_confusion;
    ev_opts.add(evalc);
    ev_kernel.add(evalc);
    flag_opt(evalc, "tier", ev_tier, "member (10-fold CV) or supporter|sympathizer (train on Members)");
    flag_opt(evalc, "folds", ev_folds, "Cross-validation folds");
    evalc->add_flag("--mean-folds", ev_mean_folds, "Average fold macro-F1 instead of pooling predictions")
        ->envname("HTIM_MEAN_FOLDS");
    flag_opt(evalc, "out", ev_out, "Report JSON");
    flag_opt(evalc, "confusion", ev_confusion, "Optional confusion-matrix CSV");

    // project
    auto* proj = app.add_subcommand("project", "t-SNE projection of user feature vectors");
    FeatureOpts pr_opts;
    std::string pr_tier;
    eval::TsneConfig tc;
    fs::path pr_out = "projection.svg", pr_csv;
    pr_opts.add(proj);
    flag_opt(proj, "tier", pr_tier, "Restrict to one tier (default: all labeled users)");
    flag_opt(proj, "perplexity", tc.perplexity, "t-SNE perplexity");
    flag_opt(proj, "iterations", tc.iterations, "t-SNE iterations");
    flag_opt(proj, "out", pr_out, "SVG scatter plot");
    flag_opt(proj, "csv", pr_csv, "Optional coordinates CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    set_threads(g.threads);
    const bool deterministic = g.threads == 1;

    if (ingest->parsed()) {
        auto ds = load_dir(ingest_in);
        corpus::QuotaMap quotas{{corpus::EngagementTier::Member, q_member},
                                {corpus::EngagementTier::Supporter, q_supporter},
                                {corpus::EngagementTier::Sympathizer, q_sympathizer}};
        const auto before = ds.tweets.size();
        auto out = corpus::filter_and_quota(ds, quotas);
        fs::create_directories(ingest_out);
        corpus::write_region(out, corpus::RegionPaths::in_dir(ingest_out));
        std::cout << "users " << out.users.size() << " tweets " << out.tweets.size() << " (of " << before
                  << ") retweet edges " << out.retweets.size() << " follows " << out.follows.size() << '\n';
    } else if (derive->parsed()) {
        auto ds = load_dir(derive_in);
        const auto members = corpus::member_parties(ds);
        const auto sup = corpus::derive_supporters(ds.follows, members, sup_threshold);
        const auto sym = corpus::derive_sympathizers(ds.follows, members, sup, sym_cap);
        corpus::apply_derived_tiers(ds, sup, sym);
        const fs::path out = derive_out.empty() ? derive_in : derive_out;
        fs::create_directories(out);
        corpus::write_region(ds, corpus::RegionPaths::in_dir(out));
        std::cout << "members " << members.size() << " supporters " << sup.size() << " sympathizers " << sym.size()
                  << '\n';
    } else if (synth->parsed()) {
        sc.seed = g.seed;
        sc.validate();
        const auto ds = corpus::synth_region(sc);
        fs::create_directories(synth_out);
        corpus::write_region(ds, corpus::RegionPaths::in_dir(synth_out));
        std::cout << "users " << ds.users.size() << " tweets " << ds.tweets.size() << " retweet edges "
                  << ds.retweets.size() << " follows " << ds.follows.size() << '\n';
    } else if (ttext->parsed()) {
        auto ds = load_dir(tt_in);
        if (!tt_no_filter) ds = corpus::filter_and_quota(ds, corpus::default_quotas());
        graph::EmbeddingTable table;
        table.method = tt_featurizer;
        if (tt_featurizer == "tfidf") {
            std::vector<text::Document> docs;
            std::vector<std::string> owners;
            for (const auto& u : ds.users) {
                if (!u.tier || u.text_absent()) continue;
                text::Document doc;
                for (const auto& tid : u.tweet_ids) {
                    auto toks = text::tokenize(ds.find_tweet(tid)->text);
                    doc.insert(doc.end(), toks.begin(), toks.end());
                }
                docs.push_back(std::move(doc));
                owners.push_back(u.user_id);
            }
            if (docs.empty()) throw DataError("no labeled user has tweets");
            const auto model = text::fit_tfidf(docs, tt_dim);
            const auto vecs = text::transform_all(model, docs);
            table.vectors = Matrix(0, model.dim());
            for (std::size_t i = 0; i < owners.size(); ++i) table.add(owners[i], vecs[i]);
        } else {
            std::vector<text::Document> sentences;
            for (const auto& t : ds.tweets) sentences.push_back(text::tokenize(t.text));
            text::CbowConfig cc;
            cc.dim = tt_dim;
            cc.seed = g.seed;
            const auto model = text::train_cbow(sentences, cc);
            table.vectors = Matrix(0, model.dim());
            for (std::size_t i = 0; i < model.terms.size(); ++i)
                table.add(model.terms[i], Vector(model.input.row(i).begin(), model.input.row(i).end()));
        }
        ensure_parent(tt_out);
        graph::write_embeddings(table, tt_out);
        std::cout << "wrote " << table.ids.size() << " vectors of dim " << table.vectors.cols << " to " << tt_out.string()
                  << '\n';
    } else if (tgraph->parsed()) {
        const auto ds = load_dir(tg_in);
        const auto gr = graph::build_graph(ds.retweets);
        graph::GraphEmbeddingConfig gc;
        gc.method = graph::parse_method(tg_method);
        gc.walks = tg_walks;
        gc.walks.seed = g.seed;
        gc.skipgram.dim = tg_dim;
        gc.skipgram.seed = g.seed;
        gc.relational.dim = tg_dim;
        gc.relational.epochs = tg_re_epochs;
        gc.relational.seed = g.seed;
        const auto table = graph::train_graph_embeddings(gr, gc);
        ensure_parent(tg_out);
        graph::write_embeddings(table, tg_out);
        std::cout << "wrote " << table.ids.size() << " " << graph::to_string(gc.method) << " embeddings to "
                  << tg_out.string() << '\n';
    } else if (fuse->parsed()) {
        const auto cfg = fuse_opts.config(g);
        if (cfg.baseline != pipeline::Baseline::None) throw UsageError("baselines have no features to fuse");
        const auto feats = pipeline::build_features(fuse_opts.dataset(), cfg);
        ensure_parent(fuse_out);
        fusion::write_hybrid_csv(feats.instances, fuse_out);
        std::cout << "wrote " << feats.instances.size() << " instances of dim "
                  << (feats.instances.empty() ? 0 : feats.instances.front().values.size()) << " to " << fuse_out.string()
                  << '\n';
    } else if (tmodel->parsed()) {
        require_file(tm_features, "fuse");
        const auto ds = load_dir(tm_in);
        const auto truth = pipeline::tier_truth(ds, tier_arg(tm_tier));
        const auto feats = fusion::read_hybrid_csv(tm_features);
        std::vector<Vector> X;
        std::vector<std::string> y;
        std::map<std::string, std::string> owner_of;
        for (const auto& f : feats) {
            // Tweet-level rows carry tweet ids; map them back to their author.
            std::string owner = f.id;
            if (!truth.count(owner))
                if (const auto* t = ds.find_tweet(f.id)) owner = t->user_id;
            auto it = truth.find(owner);
            if (it == truth.end()) continue;
            X.push_back(f.values);
            y.push_back(it->second);
        }
        if (X.empty()) throw DataError("no feature rows belong to " + tm_tier + " users");
        const auto model = model::train_svm(X, y, tm_kernel.config(g.seed));
        ensure_parent(tm_out);
        model::save_model(model, tm_out);
        std::cout << "trained on " << X.size() << " rows, " << model.classes.size() << " classes, "
                  << model.machines.size() << " machines\n";
    } else if (evalc->parsed()) {
        auto cfg = ev_opts.config(g);
        cfg.kernel = ev_kernel.config(g.seed);
        cfg.tier = tier_arg(ev_tier);
        cfg.folds = ev_folds;
        cfg.pooled = !ev_mean_folds;
        cfg.validate();
        const auto report = pipeline::run_eval(ev_opts.dataset(), cfg);
        ensure_parent(ev_out);
        pipeline::emit_report(report, {ev_out, ev_confusion}, deterministic);
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4f", report.macro_f1);
        std::cout << "macro-F1 " << buf << '\n';
    } else if (proj->parsed()) {
        const auto cfg = pr_opts.config(g);
        const auto ds = pr_opts.dataset();
        const auto feats = pipeline::build_features(ds, cfg);
        std::optional<corpus::EngagementTier> only;
        if (!pr_tier.empty()) only = tier_arg(pr_tier);
        // One point per user: average of that user's instances.
        std::map<std::string, std::pair<Vector, int>> acc;
        for (const auto& f : feats.instances) {
            auto& [sum, n] = acc[f.owner];
            if (sum.empty()) sum.assign(f.values.size(), 0.0);
            for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += f.values[k];
            ++n;
        }
        std::vector<std::string> ids;
        std::vector<Vector> X;
        std::map<std::string, std::string> party_of;
        for (auto& [uid, sn] : acc) {
            const auto* u = ds.find_user(uid);
            if (only && (!u || u->tier != only)) continue;
            for (auto& v : sn.first) v /= sn.second;
            ids.push_back(uid);
            X.push_back(std::move(sn.first));
            if (u && u->party) party_of[uid] = *u->party;
        }
        tc.seed = g.seed;
        const auto p = eval::tsne_project(ids, X, tc);
        for (const auto& w : p.warnings) std::cerr << "warning: " << w << '\n';
        ensure_parent(pr_out);
        pipeline::write_projection_svg(p, party_of, pr_out);
        if (!pr_csv.empty()) pipeline::write_projection_csv(p, pr_csv);
        std::cout << "projected " << ids.size() << " users, KL " << format_double(p.kl_final) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    }
}
