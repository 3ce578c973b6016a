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

#include "htim/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>

#include "htim/tfidf.hpp"
#include "htim/tokenizer.hpp"
#include "htim/voting.hpp"
#include "htim/word2vec.hpp"

namespace htim::pipeline {

using corpus::EngagementTier;

std::string to_string(TextFeaturizer t) {
    switch (t) {
        case TextFeaturizer::None: return "none";
        case TextFeaturizer::Tfidf: return "tfidf";
        case TextFeaturizer::W2v: return "w2v";
        case TextFeaturizer::ContextualSos: return "ctx-sos";
        case TextFeaturizer::ContextualAvg: return "ctx-avg";
        case TextFeaturizer::ContextualMax: return "ctx-max";
    }
    return "";
}

TextFeaturizer parse_text_featurizer(std::string_view s) {
    for (auto t : {TextFeaturizer::None, TextFeaturizer::Tfidf, TextFeaturizer::W2v, TextFeaturizer::ContextualSos,
                   TextFeaturizer::ContextualAvg, TextFeaturizer::ContextualMax})
        if (s == to_string(t)) return t;
    throw UsageError("unknown text featurizer '" + std::string(s) + "'");
}

bool is_tweet_level(TextFeaturizer t) {
    return t == TextFeaturizer::W2v || t == TextFeaturizer::ContextualSos || t == TextFeaturizer::ContextualAvg ||
           t == TextFeaturizer::ContextualMax;
}

void RunConfig::set_method(std::string_view method) {
    text = TextFeaturizer::None;
    graph.reset();
    baseline = Baseline::None;
    std::size_t start = 0;
    while (start <= method.size()) {
        auto end = method.find('+', start);
        if (end == std::string_view::npos) end = method.size();
        const std::string part(method.substr(start, end - start));
        start = end + 1;
        if (part == "majority" || part == "random") {
            if (method.find('+') != std::string_view::npos)
                throw UsageError("baselines cannot be combined with other methods");
            baseline = part == "majority" ? Baseline::Majority : Baseline::Random;
        } else if (part == "re" || part == "dw" || part == "n2v") {
            if (graph) throw UsageError("method '" + std::string(method) + "' names two graph methods");
            graph = graph::parse_method(part);
        } else {
            if (text != TextFeaturizer::None)
                throw UsageError("method '" + std::string(method) + "' names two text featurizers");
            text = parse_text_featurizer(part);
            if (text == TextFeaturizer::None) throw UsageError("'none' is not a method component");
        }
        if (end == method.size()) break;
    }
}

std::string RunConfig::method() const {
    if (baseline == Baseline::Majority) return "majority";
    if (baseline == Baseline::Random) return "random";
    std::string m;
    if (graph) {
        m = graph::to_string(*graph);
        for (auto& c : m) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (text != TextFeaturizer::None) m += (m.empty() ? "" : "+") + to_string(text);
    return m;
}

FusionLevel RunConfig::effective_level() const {
    if (level) return *level;
    return is_tweet_level(text) ? FusionLevel::Tweet : FusionLevel::User;
}

void RunConfig::validate() const {
    if (baseline == Baseline::None && text == TextFeaturizer::None && !graph)
        throw UsageError("at least one of the text featurizer or graph method must be set");
    const FusionLevel lv = effective_level();
    if (lv == FusionLevel::User && is_tweet_level(text))
        throw UsageError("fusion level 'user' requires a user-level text featurizer (tfidf) or none, got '" +
                         to_string(text) + "'");
    if (lv == FusionLevel::Tweet && !is_tweet_level(text))
        throw UsageError("fusion level 'tweet' requires a tweet-level text featurizer (w2v or ctx-*)");
    if (text != TextFeaturizer::None && text_dim == 0) throw UsageError("text dimension must be positive");
    if (graph && graph_dim == 0) throw UsageError("graph dimension must be positive");
    if ((text == TextFeaturizer::ContextualSos || text == TextFeaturizer::ContextualAvg ||
         text == TextFeaturizer::ContextualMax) &&
        contextual_tokens.empty())
        throw UsageError("contextual featurizers need a token-vector file (--tokens)");
    if (folds < 2) throw UsageError("folds must be >= 2");
    walks.validate();
    kernel.validate();
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json j;
    j["region"] = region;
    j["method"] = method();
    j["text"] = to_string(text);
    j["text_dim"] = text_dim;
    j["contextual_tokens"] = contextual_tokens.string();
    j["graph"] = graph ? graph::to_string(*graph) : "none";
    j["graph_dim"] = graph_dim;
    j["walks"] = {{"walks_per_node", walks.walks_per_node}, {"walk_length", walks.walk_length},
                  {"window", walks.window},                 {"epochs", walks.epochs},
                  {"p", walks.p},                           {"q", walks.q}};
    j["relational_epochs"] = relational_epochs;
    j["relational_output"] = relational_output == graph::RelationalOutput::Source   ? "source"
                             : relational_output == graph::RelationalOutput::Target ? "target"
                                                                                    : "average";
    j["fusion_level"] = effective_level() == FusionLevel::User ? "user" : "tweet";
    j["normalize_segments"] = normalize_segments;
    j["kernel"] = {{"type", "rbf"},
                   {"C", kernel.C},
                   {"gamma", kernel.gamma ? nlohmann::json(*kernel.gamma) : nlohmann::json("scale")},
                   {"tolerance", kernel.tolerance},
                   {"scheme", kernel.scheme == model::MultiClass::OneVsOne ? "ovo" : "ovr"},
                   {"standardize", kernel.standardize}};
    j["tier"] = corpus::to_string(tier);
    j["folds"] = folds;
    j["pooled"] = pooled;
    j["seed"] = seed;
    return j;
}

namespace {

bool is_labeled(const corpus::UserRecord& u) { return u.tier.has_value() && u.party.has_value(); }

}  // namespace

FeatureSet build_features(const corpus::RegionDataset& ds, const RunConfig& cfg) {
    cfg.validate();
    FeatureSet fs;
    const FusionLevel level = cfg.effective_level();
    fs.tweet_level = level == FusionLevel::Tweet;

    std::vector<const corpus::UserRecord*> users;
    for (const auto& u : ds.users)
        if (is_labeled(u)) users.push_back(&u);

    std::unordered_map<std::string, text::Document> tweet_tokens;
    for (const auto* u : users)
        for (const auto& tid : u->tweet_ids)
            if (const auto* t = ds.find_tweet(tid)) tweet_tokens.emplace(tid, text::tokenize(t->text));

    // Text modality.
    std::unordered_map<std::string, text::TextVector> user_text;   // user-level
    std::unordered_map<std::string, text::TextVector> tweet_text;  // tweet-level
    if (cfg.text == TextFeaturizer::Tfidf) {
        std::vector<text::Document> docs;
        std::vector<const corpus::UserRecord*> owners;
        for (const auto* u : users) {
            if (u->text_absent()) continue;
            text::Document doc;
            for (const auto& tid : u->tweet_ids) {
                const auto& toks = tweet_tokens[tid];
                doc.insert(doc.end(), toks.begin(), toks.end());
            }
            docs.push_back(std::move(doc));
            owners.push_back(u);
        }
        if (docs.empty()) throw DataError("no labeled user has text for tf-idf");
        fs.tfidf = text::fit_tfidf(docs, cfg.text_dim);
        const auto vecs = text::transform_all(*fs.tfidf, docs);
        for (std::size_t i = 0; i < owners.size(); ++i)
            user_text[owners[i]->user_id] = {owners[i]->user_id, vecs[i], text::Provenance::Tfidf, false};
        fs.user_text_dim = fs.tfidf->dim();
    } else if (cfg.text == TextFeaturizer::W2v) {
        std::vector<text::Document> sentences;
        std::vector<std::string> ids;
        for (const auto* u : users)
            for (const auto& tid : u->tweet_ids) {
                sentences.push_back(tweet_tokens[tid]);
                ids.push_back(tid);
            }
        if (sentences.empty()) throw DataError("no labeled user has text for word2vec");
        text::CbowConfig cc;
        cc.dim = cfg.text_dim;
        cc.seed = cfg.seed;
        fs.word_model = text::train_cbow(sentences, cc);
        for (std::size_t i = 0; i < ids.size(); ++i)
            tweet_text[ids[i]] = text::embed_tweet_static(*fs.word_model, ids[i], sentences[i]);
        fs.text_dim = fs.user_text_dim = cfg.text_dim;
    } else if (cfg.text != TextFeaturizer::None) {
        const auto pooling = cfg.text == TextFeaturizer::ContextualSos   ? text::Pooling::Sos
                             : cfg.text == TextFeaturizer::ContextualAvg ? text::Pooling::Average
                                                                         : text::Pooling::MaxPool;
        const auto rows = text::read_contextual_jsonl(cfg.contextual_tokens);
        if (rows.empty()) throw DataError("contextual token file is empty");
        fs.text_dim = fs.user_text_dim = rows.front().dim;
        for (const auto& r : rows) {
            if (r.dim != fs.text_dim) throw DataError("contextual token file mixes dimensions");
            tweet_text[r.tweet_id] = text::pool_contextual(r, pooling);
        }
    }
    if (fs.tweet_level) {
        for (const auto* u : users) {
            std::vector<text::TextVector> present;
            for (const auto& tid : u->tweet_ids) {
                auto it = tweet_text.find(tid);
                if (it != tweet_text.end() && !it->second.absent) present.push_back(it->second);
            }
            user_text[u->user_id] = text::user_text_vector(u->user_id, present, fs.user_text_dim);
        }
    }

    // Interaction modality.
    if (cfg.graph) {
        const auto g = graph::build_graph(ds.retweets);
        graph::GraphEmbeddingConfig gc;
        gc.method = *cfg.graph;
        gc.walks = cfg.walks;
        gc.walks.seed = cfg.seed;
        gc.skipgram.dim = cfg.graph_dim;
        gc.skipgram.seed = cfg.seed;
        gc.relational.dim = cfg.graph_dim;
        gc.relational.epochs = cfg.relational_epochs;
        gc.relational.output = cfg.relational_output;
        gc.relational.seed = cfg.seed;
        fs.graph_table = graph::train_graph_embeddings(g, gc);
        fs.inter_dim = cfg.graph_dim;
    }

    const fusion::FusionOptions opt{cfg.normalize_segments};
    auto inter_segment = [&](const std::string& uid) {
        if (!fs.graph_table) return fusion::Segment{{}, true};
        auto l = graph::lookup(*fs.graph_table, uid);
        return fusion::Segment{std::move(l.values), l.absent};
    };
    auto text_segment = [&](const std::unordered_map<std::string, text::TextVector>& m, const std::string& id) {
        auto it = m.find(id);
        if (it == m.end() || it->second.absent) return fusion::Segment{{}, true};
        return fusion::Segment{it->second.values, false};
    };
    auto zero_feature = [&](const std::string& id, const std::string& owner, std::vector<std::size_t> dims) {
        fusion::HybridFeature f;
        f.id = id;
        f.owner = owner;
        std::size_t off = 0;
        for (auto d : dims) {
            f.boundaries.push_back(off);
            off += d;
        }
        f.boundaries.push_back(off);
        f.values.assign(off, 0.0);
        f.flags = {true, true};
        return f;
    };

    for (const auto* u : users) {
        const auto inter = inter_segment(u->user_id);
        if (!fs.tweet_level) {
            const auto ut = text_segment(user_text, u->user_id);
            if (ut.absent && inter.absent)
                fs.instances.push_back(zero_feature(u->user_id, u->user_id, {fs.user_text_dim, fs.inter_dim}));
            else
                fs.instances.push_back(
                    fusion::fuse_user_level(u->user_id, ut, inter, fs.user_text_dim, fs.inter_dim, opt));
            continue;
        }
        const auto ut = text_segment(user_text, u->user_id);
        bool any = false;
        for (const auto& tid : u->tweet_ids) {
            const auto tt = text_segment(tweet_text, tid);
            any = true;
            if (tt.absent && ut.absent && inter.absent)
                fs.instances.push_back(zero_feature(tid, u->user_id, {fs.text_dim, fs.user_text_dim, fs.inter_dim}));
            else
                fs.instances.push_back(fusion::fuse_tweet_level(tid, u->user_id, tt, ut, inter, fs.text_dim,
                                                                fs.user_text_dim, fs.inter_dim, opt));
        }
        if (!any) {
            const fusion::Segment none{{}, true};
            if (inter.absent)
                fs.instances.push_back(
                    zero_feature(u->user_id, u->user_id, {fs.text_dim, fs.user_text_dim, fs.inter_dim}));
            else
                fs.instances.push_back(fusion::fuse_tweet_level(u->user_id, u->user_id, none, none, inter,
                                                                fs.text_dim, fs.user_text_dim, fs.inter_dim, opt));
        }
    }
    return fs;
}

FitPredict svm_fit_predict(const model::KernelConfig& cfg) {
    return [cfg](const std::vector<Vector>& train_x, const std::vector<std::string>& train_y,
                 const std::vector<Vector>& test_x, std::uint64_t seed) {
        model::KernelConfig c = cfg;
        c.seed = seed;
        const auto m = model::train_svm(train_x, train_y, c);
        return model::predict_all(m, test_x);
    };
}

FitPredict baseline_fit_predict(Baseline b) {
    return [b](const std::vector<Vector>&, const std::vector<std::string>& train_y, const std::vector<Vector>& test_x,
               std::uint64_t seed) {
        std::vector<model::Prediction> out(test_x.size());
        if (b == Baseline::Majority) {
            model::MajorityBaseline mb(train_y);
            for (auto& p : out) p.label = mb.predict();
        } else {
            model::RandomBaseline rb(train_y, seed);
            for (auto& p : out) p.label = rb.predict();
        }
        return out;
    };
}

namespace {

struct InstanceIndex {
    std::map<std::string, std::vector<std::size_t>> by_owner;
};

InstanceIndex index_instances(const FeatureSet& fs) {
    InstanceIndex idx;
    for (std::size_t i = 0; i < fs.instances.size(); ++i) idx.by_owner[fs.instances[i].owner].push_back(i);
    return idx;
}

// Trains on train users, returns user -> predicted label for test users.
std::map<std::string, std::string> fit_and_vote(const FeatureSet& fs, const InstanceIndex& idx,
                                                const std::vector<std::string>& train_users,
                                                const std::map<std::string, std::string>& truth,
                                                const std::vector<std::string>& test_users, const FitPredict& fit,
                                                std::uint64_t seed) {
    std::vector<Vector> tx, sx;
    std::vector<std::string> ty;
    std::vector<std::string> s_owner;
    auto instances_of = [&](const std::string& u) -> const std::vector<std::size_t>& {
        auto it = idx.by_owner.find(u);
        if (it == idx.by_owner.end()) throw DataError("no feature instances for user '" + u + "'");
        return it->second;
    };
    for (const auto& u : train_users)
        for (auto i : instances_of(u)) {
            tx.push_back(fs.instances[i].values);
            ty.push_back(truth.at(u));
        }
    for (const auto& u : test_users)
        for (auto i : instances_of(u)) {
            sx.push_back(fs.instances[i].values);
            s_owner.push_back(u);
        }
    const auto preds = fit(tx, ty, sx, seed);
    std::map<std::string, std::vector<model::Prediction>> grouped;
    for (std::size_t i = 0; i < preds.size(); ++i) grouped[s_owner[i]].push_back(preds[i]);
    std::map<std::string, std::string> out;
    for (auto& [u, ps] : grouped) out[u] = model::majority_vote(ps);
    return out;
}

std::vector<std::string> label_union(const std::map<std::string, std::string>& a,
                                     const std::map<std::string, std::string>& b) {
    std::set<std::string> s;
    for (const auto& kv : a) s.insert(kv.second);
    for (const auto& kv : b) s.insert(kv.second);
    return {s.begin(), s.end()};
}

}  // namespace

EvalReport cross_validate(const FeatureSet& fs, const std::map<std::string, std::string>& truth,
                          const FitPredict& fit, const CvOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> ids, labels;
    for (const auto& [u, l] : truth) {
        ids.push_back(u);
        labels.push_back(l);
    }
    const auto split = eval::kfold_split(ids, labels, opt.k, opt.seed);
    const auto idx = index_instances(fs);
    const auto classes = label_union(truth, {});

    std::vector<std::map<std::string, std::string>> fold_preds(opt.k);
    std::vector<std::string> errors(opt.k);
#pragma omp parallel for schedule(dynamic, 1)
    for (int f = 0; f < opt.k; ++f) {
        try {
            fold_preds[f] = fit_and_vote(fs, idx, split.train[f], truth, split.test[f], fit,
                                         derive_seed(opt.seed, static_cast<std::uint64_t>(f)));
        } catch (const std::exception& e) {
            errors[f] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw DataError("cross-validation fold failed: " + e);

    EvalReport r;
    r.mode = "cv";
    r.tier = "member";
    r.seed = opt.seed;
    r.warnings = split.warnings;
    r.confusion = eval::ConfusionMatrix(classes);
    double fold_sum = 0.0;
    for (int f = 0; f < opt.k; ++f) {
        eval::ConfusionMatrix cm(classes);
        for (const auto& [u, p] : fold_preds[f]) {
            cm.add(truth.at(u), p);
            r.confusion.add(truth.at(u), p);
            r.predictions[u] = p;
        }
        FoldResult fr;
        fr.fold = f;
        fr.train_users = split.train[f].size();
        fr.test_users = split.test[f].size();
        fr.macro_f1 = eval::macro_f1(cm);
        fold_sum += fr.macro_f1;
        r.folds.push_back(fr);
    }
    r.per_class = eval::per_class_scores(r.confusion);
    r.macro_f1 = opt.pooled ? eval::macro_f1(r.confusion) : fold_sum / opt.k;
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

EvalReport transfer_evaluate(const FeatureSet& fs, const std::map<std::string, std::string>& train_truth,
                             const std::map<std::string, std::string>& test_truth, const FitPredict& fit,
                             std::uint64_t seed) {
    if (test_truth.empty()) throw DataError("transfer evaluation has an empty test tier");
    if (train_truth.empty()) throw DataError("transfer evaluation has an empty training tier");
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> train_users, test_users;
    for (const auto& kv : train_truth) train_users.push_back(kv.first);
    for (const auto& kv : test_truth) test_users.push_back(kv.first);
    const auto idx = index_instances(fs);
    const auto preds = fit_and_vote(fs, idx, train_users, train_truth, test_users, fit, seed);

    EvalReport r;
    r.mode = "transfer";
    r.seed = seed;
    r.confusion = eval::ConfusionMatrix(label_union(train_truth, test_truth));
    for (const auto& [u, p] : preds) {
        r.confusion.add(test_truth.at(u), p);
        r.predictions[u] = p;
    }
    r.per_class = eval::per_class_scores(r.confusion);
    r.macro_f1 = eval::macro_f1(r.confusion);
    FoldResult fr;
    fr.train_users = train_users.size();
    fr.test_users = test_users.size();
    fr.macro_f1 = r.macro_f1;
    r.folds.push_back(fr);
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::map<std::string, std::string> tier_truth(const corpus::RegionDataset& ds, EngagementTier tier) {
    std::map<std::string, std::string> out;
    for (const auto* u : ds.users_in_tier(tier)) out.emplace(u->user_id, *u->party);
    return out;
}

namespace {
FitPredict fit_for(const RunConfig& cfg) {
    return cfg.baseline == Baseline::None ? svm_fit_predict(cfg.kernel) : baseline_fit_predict(cfg.baseline);
}

FeatureSet features_for(const corpus::RegionDataset& ds, const RunConfig& cfg) {
    if (cfg.baseline != Baseline::None) {
        // Baselines ignore features; one empty instance per labeled user.
        FeatureSet fs;
        for (const auto& u : ds.users)
            if (is_labeled(u)) {
                fusion::HybridFeature f;
                f.id = f.owner = u.user_id;
                f.boundaries = {0};
                fs.instances.push_back(std::move(f));
            }
        return fs;
    }
    return build_features(ds, cfg);
}
}  // namespace

EvalReport run_cv(const corpus::RegionDataset& ds, const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto fs = features_for(ds, cfg);
    auto r = cross_validate(fs, tier_truth(ds, EngagementTier::Member), fit_for(cfg), {cfg.folds, cfg.seed, cfg.pooled});
    r.config = cfg.to_json();
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

EvalReport run_transfer(const corpus::RegionDataset& ds, const RunConfig& cfg) {
    if (cfg.tier == EngagementTier::Member) throw UsageError("transfer evaluation targets supporters or sympathizers");
    const auto t0 = std::chrono::steady_clock::now();
    const auto fs = features_for(ds, cfg);
    auto r = transfer_evaluate(fs, tier_truth(ds, EngagementTier::Member), tier_truth(ds, cfg.tier), fit_for(cfg),
                               cfg.seed);
    r.tier = corpus::to_string(cfg.tier);
    r.config = cfg.to_json();
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

EvalReport run_eval(const corpus::RegionDataset& ds, const RunConfig& cfg) {
    return cfg.tier == EngagementTier::Member ? run_cv(ds, cfg) : run_transfer(ds, cfg);
}

nlohmann::ordered_json report_to_json(const EvalReport& r, bool zero_runtime) {
    nlohmann::ordered_json j;
    j["config"] = r.config;
    j["tier"] = r.tier;
    j["mode"] = r.mode;
    auto folds = nlohmann::ordered_json::array();
    for (const auto& f : r.folds)
        folds.push_back({{"fold", f.fold},
                         {"train_users", f.train_users},
                         {"test_users", f.test_users},
                         {"macro_f1", f.macro_f1}});
    j["folds"] = std::move(folds);
    j["macro_f1"] = r.macro_f1;
    j["classes"] = r.confusion.classes;
    nlohmann::ordered_json pc = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < r.per_class.size(); ++c)
        pc[r.confusion.classes[c]] = {{"precision", r.per_class[c].precision},
                                      {"recall", r.per_class[c].recall},
                                      {"f1", r.per_class[c].f1},
                                      {"support", r.per_class[c].support}};
    j["per_class"] = std::move(pc);
    j["confusion"] = r.confusion.counts;
    nlohmann::ordered_json preds = nlohmann::ordered_json::object();
    for (const auto& [u, p] : r.predictions) preds[u] = p;
    j["predictions"] = std::move(preds);
    j["warnings"] = r.warnings;
    j["seed"] = r.seed;
    j["runtime_s"] = zero_runtime ? 0.0 : r.runtime_s;
    return j;
}

void write_confusion_csv(const eval::ConfusionMatrix& cm, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << "true\\pred";
    for (const auto& c : cm.classes) out << ',' << c;
    out << '\n';
    for (std::size_t i = 0; i < cm.classes.size(); ++i) {
        out << cm.classes[i];
        for (long v : cm.counts[i]) out << ',' << v;
        out << '\n';
    }
}

void emit_report(const EvalReport& r, const ReportPaths& paths, bool zero_runtime) {
    {
        std::ofstream out(paths.json, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + paths.json.string());
        out << report_to_json(r, zero_runtime).dump(2) << '\n';
        if (!out) throw DataError("failed writing " + paths.json.string());
    }
    if (!paths.confusion_csv.empty()) write_confusion_csv(r.confusion, paths.confusion_csv);
}

void write_projection_csv(const eval::Projection2D& proj, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << "id,x,y\n";
    for (std::size_t i = 0; i < proj.ids.size(); ++i)
        out << proj.ids[i] << ',' << format_double(proj.coords(i, 0)) << ',' << format_double(proj.coords(i, 1))
            << '\n';
}

void write_projection_svg(const eval::Projection2D& proj, const std::map<std::string, std::string>& party_of,
                          const std::filesystem::path& path) {
    static const char* kPalette[] = {"#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
                                     "#42d4f4", "#f032e6", "#bfef45", "#9a6324", "#469990"};
    std::set<std::string> parties;
    for (const auto& id : proj.ids) {
        auto it = party_of.find(id);
        parties.insert(it == party_of.end() ? "unlabeled" : it->second);
    }
    std::map<std::string, std::string> color;
    std::size_t k = 0;
    for (const auto& p : parties) color[p] = p == "unlabeled" ? "#999999" : kPalette[k++ % 10];

    const double size = 800.0, pad = 40.0;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (proj.coords.rows > 0) {
        xmin = ymin = INFINITY;
        xmax = ymax = -INFINITY;
        for (std::size_t i = 0; i < proj.coords.rows; ++i) {
            xmin = std::min(xmin, proj.coords(i, 0));
            xmax = std::max(xmax, proj.coords(i, 0));
            ymin = std::min(ymin, proj.coords(i, 1));
            ymax = std::max(ymax, proj.coords(i, 1));
        }
    }
    const double sx = (size - 2 * pad) / std::max(xmax - xmin, 1e-12);
    const double sy = (size - 2 * pad) / std::max(ymax - ymin, 1e-12);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    char buf[256];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n";
    out << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < proj.ids.size(); ++i) {
        auto it = party_of.find(proj.ids[i]);
        const std::string party = it == party_of.end() ? "unlabeled" : it->second;
        std::snprintf(buf, sizeof(buf), "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"%s\" fill-opacity=\"0.8\">",
                      pad + (proj.coords(i, 0) - xmin) * sx, pad + (proj.coords(i, 1) - ymin) * sy,
                      color[party].c_str());
        out << buf << "<title>" << proj.ids[i] << " (" << party << ")</title></circle>\n";
    }
    out << "<g id=\"legend\">\n";
    double y = 20.0;
    for (const auto& [party, c] : color) {
        std::snprintf(buf, sizeof(buf), "<rect x=\"10\" y=\"%.0f\" width=\"12\" height=\"12\" fill=\"%s\"/>", y,
                      c.c_str());
        out << buf;
        std::snprintf(buf, sizeof(buf), "<text x=\"28\" y=\"%.0f\" font-size=\"12\" font-family=\"sans-serif\">",
                      y + 10);
        out << buf << party << "</text>\n";
        y += 18.0;
    }
    out << "</g>\n</svg>\n";
}

}  // namespace htim::pipeline
