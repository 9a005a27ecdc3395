#include "rewriter/demo.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "rewriter/emit.hpp"
#include "rewriter/errors.hpp"
#include "rewriter/parser.hpp"
#include "rewriter/text_embed.hpp"
#include "rewriter/tree_edit.hpp"

namespace rewriter {

using nlohmann::json;

std::string selector_tag_name(SelectorTag t) {
  switch (t) {
    case SelectorTag::ZeroShot: return "zero_shot";
    case SelectorTag::Random: return "random";
    case SelectorTag::Tree: return "tree";
    case SelectorTag::SentTrans: return "senttrans";
  }
  return "zero_shot";
}

namespace {

SelectorTag selector_tag_from_name(const std::string& s) {
  if (s == "zero_shot") return SelectorTag::ZeroShot;
  if (s == "random") return SelectorTag::Random;
  if (s == "tree") return SelectorTag::Tree;
  if (s == "senttrans") return SelectorTag::SentTrans;
  throw ConfigError("unknown selector tag: " + s);
}

RewriteTuple score_one(const WorkloadQuery& q,
                       const std::vector<Demonstration>& demos,
                       SelectorTag tag, ChatBackend& backend,
                       const CostBackend& cost) {
  QueryTree tree = parse(q.sql);
  Suggestion s = suggest_rules(tree, demos, backend);
  SequenceResult applied = apply_sequence(tree, s.response.rules);
  RewriteTuple t;
  t.query_id = q.id;
  t.query_sql = q.sql;
  if (!demos.empty()) t.demo = demos.front();
  t.rules = s.response.rules;
  t.selector = tag;
  const bool any_match =
      std::any_of(applied.applied.begin(), applied.applied.end(),
                  [](const auto& p) { return p.second; });
  const bool is_empty_rule =
      t.rules.size() == 1 && t.rules.front() == "EMPTY";
  if (is_empty_rule || !any_match) {
    t.alpha = 1.0;
  } else {
    t.alpha = improved_margin(tree, applied.tree, cost);
  }
  return t;
}

}  // namespace

std::vector<RewriteTuple> stage1_candidates(
    const std::vector<WorkloadQuery>& training_queries, ChatBackend& backend,
    const CostBackend& cost, PrepareStats* stats) {
  std::vector<RewriteTuple> out;
  for (const auto& q : training_queries) {
    try {
      out.push_back(score_one(q, {}, SelectorTag::ZeroShot, backend, cost));
    } catch (const Error& e) {
      if (stats) stats->failures.emplace_back(q.id, e.what());
    }
  }
  return out;
}

std::vector<Demonstration> improving_candidates(
    const std::vector<RewriteTuple>& tuples) {
  std::vector<Demonstration> out;
  for (const auto& t : tuples) {
    if (t.alpha > 1.0) out.push_back({t.query_sql, t.rules});
  }
  return out;
}

std::size_t random_select(const QueryTree& input,
                          const std::vector<Demonstration>& candidates,
                          std::uint64_t seed) {
  if (candidates.empty()) throw EmptyCandidates();
  // Mixing in the query text keeps per-query draws independent while the
  // whole run stays reproducible under one seed.
  std::mt19937_64 rng(seed ^ fnv1a_hash(emit(input)));
  std::uniform_int_distribution<std::size_t> d(0, candidates.size() - 1);
  return d(rng);
}

std::size_t tree_select(const QueryTree& input,
                        const std::vector<Demonstration>& candidates) {
  if (candidates.empty()) throw EmptyCandidates();
  const LabeledTree in = labeled_tree_of(input);
  std::size_t best = 0;
  int best_dist = -1;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const int d =
        tree_edit_distance(in, labeled_tree_of(parse(candidates[i].query_sql)));
    if (best_dist < 0 || d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

std::size_t text_select(const QueryTree& input,
                        const std::vector<Demonstration>& candidates) {
  if (candidates.empty()) throw EmptyCandidates();
  constexpr std::size_t kDim = 64;
  const std::vector<double> in = embed_text(emit(input), kDim);
  std::size_t best = 0;
  double best_sim = -2.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s =
        cosine_similarity(in, embed_text(candidates[i].query_sql, kDim));
    if (s > best_sim) {
      best_sim = s;
      best = i;
    }
  }
  return best;
}

std::vector<RewriteTuple> stage2_tuples(
    const std::vector<WorkloadQuery>& training_queries,
    const std::vector<Demonstration>& candidates, ChatBackend& backend,
    const CostBackend& cost, std::uint64_t seed, PrepareStats* stats) {
  std::vector<RewriteTuple> out;
  for (const auto& q : training_queries) {
    std::vector<Demonstration> eligible;
    for (const auto& c : candidates) {
      if (c.query_sql != q.sql) eligible.push_back(c);
    }
    for (SelectorTag tag :
         {SelectorTag::Random, SelectorTag::Tree, SelectorTag::SentTrans}) {
      try {
        if (eligible.empty()) throw EmptyCandidates();
        QueryTree tree = parse(q.sql);
        std::size_t pick = 0;
        switch (tag) {
          case SelectorTag::Random:
            pick = random_select(tree, eligible, seed);
            break;
          case SelectorTag::Tree:
            pick = tree_select(tree, eligible);
            break;
          default:
            pick = text_select(tree, eligible);
            break;
        }
        out.push_back(
            score_one(q, {eligible[pick]}, tag, backend, cost));
      } catch (const Error& e) {
        if (stats) {
          stats->failures.emplace_back(
              q.id + "/" + selector_tag_name(tag), e.what());
        }
      }
    }
  }
  return out;
}

std::vector<TrainingTriplet> build_triplets(
    const std::vector<RewriteTuple>& tuples, PrepareStats* stats) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RewriteTuple*>> groups;
  for (const auto& t : tuples) {
    auto [it, inserted] = groups.try_emplace(t.query_sql);
    if (inserted) order.push_back(t.query_sql);
    it->second.push_back(&t);
  }
  std::vector<TrainingTriplet> out;
  for (const auto& sql : order) {
    const RewriteTuple* pos = nullptr;
    const RewriteTuple* neg = nullptr;
    for (const RewriteTuple* t : groups[sql]) {
      if (!t->demo.has_value()) continue;
      if (t->alpha > 1.0 && (pos == nullptr || t->alpha > pos->alpha)) pos = t;
      if (t->alpha < 1.0 && (neg == nullptr || t->alpha < neg->alpha)) neg = t;
    }
    if (pos != nullptr && neg != nullptr) {
      out.push_back({sql, pos->demo->query_sql, neg->demo->query_sql});
    } else if (stats) {
      ++stats->triplets_skipped;
    }
  }
  return out;
}

DemoPool build_pool(const std::vector<RewriteTuple>& tuples) {
  std::vector<std::string> order;
  std::map<std::string, const RewriteTuple*> best;
  for (const auto& t : tuples) {
    auto [it, inserted] = best.try_emplace(t.query_sql, &t);
    if (inserted) {
      order.push_back(t.query_sql);
    } else if (t.alpha > it->second->alpha) {
      it->second = &t;
    }
  }
  DemoPool pool;
  for (const auto& sql : order) {
    const RewriteTuple* t = best[sql];
    if (t->alpha > 1.0) pool.entries.push_back({t->query_sql, t->rules});
  }
  pool.content_hash = pool_content_hash(pool.entries);
  return pool;
}

std::string pool_content_hash(const std::vector<Demonstration>& entries) {
  std::string blob;
  for (const auto& e : entries) {
    blob += e.query_sql;
    blob += '\x1f';
    for (const auto& r : e.rules) {
      blob += r;
      blob += ',';
    }
    blob += '\x1e';
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a_hash(blob)));
  return std::string(buf);
}

std::string tuple_to_json(const RewriteTuple& t) {
  json j{{"query_id", t.query_id},
         {"query_sql", t.query_sql},
         {"rules", t.rules},
         {"alpha", t.alpha},
         {"selector", selector_tag_name(t.selector)}};
  if (t.demo.has_value()) {
    j["demo"] = json{{"query_sql", t.demo->query_sql}, {"rules", t.demo->rules}};
  }
  return j.dump();
}

RewriteTuple tuple_from_json(const std::string& line) {
  json j = json::parse(line);
  RewriteTuple t;
  t.query_id = j.at("query_id").get<std::string>();
  t.query_sql = j.at("query_sql").get<std::string>();
  t.rules = j.at("rules").get<std::vector<std::string>>();
  t.alpha = j.at("alpha").get<double>();
  t.selector = selector_tag_from_name(j.at("selector").get<std::string>());
  if (j.contains("demo")) {
    Demonstration d;
    d.query_sql = j.at("demo").at("query_sql").get<std::string>();
    d.rules = j.at("demo").at("rules").get<std::vector<std::string>>();
    t.demo = std::move(d);
  }
  return t;
}

std::string triplet_to_json(const TrainingTriplet& t) {
  return json{{"anchor_sql", t.anchor_sql},
              {"positive_sql", t.positive_sql},
              {"negative_sql", t.negative_sql}}
      .dump();
}

TrainingTriplet triplet_from_json(const std::string& line) {
  json j = json::parse(line);
  return {j.at("anchor_sql").get<std::string>(),
          j.at("positive_sql").get<std::string>(),
          j.at("negative_sql").get<std::string>()};
}

void save_pool_file(const DemoPool& pool, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << json{{"format_version", DemoPool::kFormatVersion},
              {"content_hash", pool.content_hash}}
             .dump()
      << "\n";
  for (std::size_t i = 0; i < pool.entries.size(); ++i) {
    out << json{{"id", i},
                {"query_sql", pool.entries[i].query_sql},
                {"rules", pool.entries[i].rules}}
               .dump()
        << "\n";
  }
}

DemoPool load_pool_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact(path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty pool file: " + path);
  json meta = json::parse(line);
  if (meta.at("format_version").get<int>() != DemoPool::kFormatVersion) {
    throw VersionMismatch("pool format " +
                          meta.at("format_version").dump());
  }
  DemoPool pool;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    pool.entries.push_back({j.at("query_sql").get<std::string>(),
                            j.at("rules").get<std::vector<std::string>>()});
  }
  pool.content_hash = pool_content_hash(pool.entries);
  const std::string recorded = meta.at("content_hash").get<std::string>();
  if (recorded != pool.content_hash) {
    throw CorruptCheckpoint("pool hash " + recorded + " != " +
                            pool.content_hash);
  }
  return pool;
}

}  // namespace rewriter
