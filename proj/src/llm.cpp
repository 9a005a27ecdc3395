#include "rewriter/llm.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "rewriter/emit.hpp"
#include "rewriter/errors.hpp"
#include "rewriter/parser.hpp"

namespace rewriter {

namespace {

constexpr const char* kInstruction =
    "You are a SQL query rewrite expert. Given a set of rewrite rules and "
    "an input query, output the best sequence of rule names to apply.";

std::string join_rules(const RuleSequence& rules) {
  std::string out;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (i) out += ", ";
    out += rules[i];
  }
  return out;
}

}  // namespace

std::string build_prompt(const std::string& query_sql,
                         const std::vector<Demonstration>& demos) {
  std::string p = kInstruction;
  p += "\nRules:\n";
  for (const auto& r : rule_registry()) {
    p += "- " + r.name + ": " + r.description + "\n";
  }
  if (!demos.empty()) {
    p += "Demonstration:\n";
    for (const auto& d : demos) {
      p += "Input query: " + d.query_sql + "\n";
      p += "Rules applied: " + join_rules(d.rules) + "\n";
    }
  }
  p += "Input query: " + query_sql + "\n";
  p += "Rules applied:";
  return p;
}

std::string build_prompt(const QueryTree& query,
                         const std::vector<Demonstration>& demos) {
  return build_prompt(emit(query), demos);
}

RuleResponse parse_response(const std::string& raw) {
  RuleResponse out;
  out.raw_text = raw;

  // Tokenize on identifier boundaries.
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : raw) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      cur.push_back(c);
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);

  auto upper = [](std::string s) {
    for (auto& c : s) c = std::toupper(static_cast<unsigned char>(c));
    return s;
  };
  auto looks_like_rule_name = [](const std::string& t) {
    if (t.size() < 2) return false;
    bool has_alpha = false;
    for (char c : t) {
      if (std::islower(static_cast<unsigned char>(c))) return false;
      if (std::isupper(static_cast<unsigned char>(c))) has_alpha = true;
    }
    return has_alpha;
  };

  std::vector<std::string> seen;
  for (const std::string& t : tokens) {
    const std::string u = upper(t);
    if (is_registry_rule(u)) {
      if (std::find(out.rules.begin(), out.rules.end(), u) == out.rules.end()) {
        out.rules.push_back(u);
      }
    } else if (looks_like_rule_name(t)) {
      if (std::find(seen.begin(), seen.end(), t) == seen.end()) {
        seen.push_back(t);
        out.rejected_tokens.push_back(t);
      }
    }
  }

  // EMPTY cannot ride along with real rules.
  if (out.rules.size() > 1) {
    out.rules.erase(std::remove(out.rules.begin(), out.rules.end(), "EMPTY"),
                    out.rules.end());
  }
  if (out.rules.empty()) out.rules = {"EMPTY"};
  return out;
}

void MockBackend::add_table_entry(const std::string& query_sql,
                                  const std::string& response) {
  table_[query_sql] = response;
}

namespace {

// Last "Input query: ..." line of the prompt is the query under rewrite.
std::string extract_input_query(const std::string& prompt) {
  const std::string marker = "Input query: ";
  std::size_t pos = prompt.rfind(marker);
  if (pos == std::string::npos) return "";
  pos += marker.size();
  std::size_t end = prompt.find('\n', pos);
  if (end == std::string::npos) end = prompt.size();
  return prompt.substr(pos, end - pos);
}

std::vector<Demonstration> extract_demos(const std::string& prompt) {
  std::vector<Demonstration> demos;
  std::size_t demo_pos = prompt.find("Demonstration:\n");
  if (demo_pos == std::string::npos) return demos;
  std::size_t pos = demo_pos;
  const std::string q_marker = "Input query: ";
  const std::string r_marker = "Rules applied: ";
  for (;;) {
    std::size_t q = prompt.find(q_marker, pos);
    if (q == std::string::npos) break;
    std::size_t q_end = prompt.find('\n', q);
    if (q_end == std::string::npos) break;  // final input-query line
    std::size_t r = prompt.find(r_marker, q_end);
    if (r == std::string::npos) break;
    std::size_t r_end = prompt.find('\n', r);
    if (r_end == std::string::npos) break;  // trailing "Rules applied:" header
    Demonstration d;
    d.query_sql = prompt.substr(q + q_marker.size(), q_end - q - q_marker.size());
    std::string rules_text =
        prompt.substr(r + r_marker.size(), r_end - r - r_marker.size());
    d.rules = parse_response(rules_text).rules;
    demos.push_back(std::move(d));
    pos = r_end;
  }
  return demos;
}

bool has_cross_table_equality(const ExprPtr& pred) {
  for (const ExprPtr& c : split_conjuncts(pred)) {
    if (c->kind == ExprKind::Compare && c->cmp == CmpOp::Eq &&
        c->children[0]->kind == ExprKind::Column &&
        c->children[1]->kind == ExprKind::Column &&
        !c->children[0]->table.empty() && !c->children[1]->table.empty() &&
        c->children[0]->table != c->children[1]->table) {
      return true;
    }
  }
  return false;
}

RuleSequence flag_rules(const QueryTree& tree) {
  bool filter_join = false, sort_union = false, agg_project = false;
  preorder(tree.root, [&](const PlanNode& n, std::size_t) {
    if (n.kind == NodeKind::Filter &&
        n.children[0]->kind == NodeKind::Join &&
        n.children[0]->join_type == JoinType::Cartesian &&
        has_cross_table_equality(n.predicate)) {
      filter_join = true;
    }
    if (n.kind == NodeKind::Sort && n.children[0]->kind == NodeKind::Union) {
      sort_union = true;
    }
    if (n.kind == NodeKind::Aggregate &&
        n.children[0]->kind == NodeKind::Project) {
      agg_project = true;
    }
  });
  RuleSequence fired;
  if (filter_join) fired.push_back("FILTER_INTO_JOIN");
  if (sort_union) fired.push_back("SORT_UNION_TRANSPOSE");
  if (agg_project) fired.push_back("AGGREGATE_PROJECT_MERGE");
  return fired;
}

}  // namespace

std::string MockBackend::complete(const std::string& prompt,
                                  const ChatParams& params) {
  (void)params;
  const std::string sql = extract_input_query(prompt);
  if (mode_ == Mode::Table) {
    auto it = table_.find(sql);
    return it == table_.end() ? "EMPTY" : it->second;
  }

  QueryTree tree;
  try {
    tree = parse(sql);
  } catch (const Error&) {
    return "EMPTY";
  }
  const RuleSequence fired = flag_rules(tree);
  const std::vector<Demonstration> demos = extract_demos(prompt);

  if (demos.empty()) {
    return fired.empty() ? "EMPTY" : join_rules(fired);
  }

  // Demonstration-guided answer: keep the flagged rules the examples
  // vouch for; with no overlap the model just imitates the example.
  std::vector<std::string> demo_rules;
  for (const auto& d : demos) {
    for (const auto& r : d.rules) {
      if (std::find(demo_rules.begin(), demo_rules.end(), r) ==
          demo_rules.end()) {
        demo_rules.push_back(r);
      }
    }
  }
  RuleSequence supported;
  for (const auto& r : fired) {
    if (std::find(demo_rules.begin(), demo_rules.end(), r) != demo_rules.end()) {
      supported.push_back(r);
    }
  }
  if (!supported.empty()) return join_rules(supported);
  return join_rules(demos.front().rules);
}

HttpBackend::HttpBackend() {
  const char* url = std::getenv("RULEREWRITER_API_URL");
  const char* key = std::getenv("RULEREWRITER_API_KEY");
  url_ = url ? url : "";
  api_key_ = key ? key : "";
}

HttpBackend::HttpBackend(std::string url, std::string api_key)
    : url_(std::move(url)), api_key_(std::move(api_key)) {}

std::string HttpBackend::complete(const std::string& prompt,
                                  const ChatParams& params) {
  if (url_.empty()) {
    throw BackendUnavailable("RULEREWRITER_API_URL is not set");
  }

  // Split scheme://host[:port]/path
  std::string rest = url_;
  std::string scheme = "http";
  if (auto p = rest.find("://"); p != std::string::npos) {
    scheme = rest.substr(0, p);
    rest = rest.substr(p + 3);
  }
  std::string host = rest;
  std::string path = "/";
  if (auto p = rest.find('/'); p != std::string::npos) {
    host = rest.substr(0, p);
    path = rest.substr(p);
  }

  nlohmann::json body = {
      {"model", params.model_id},
      {"messages", nlohmann::json::array({nlohmann::json{
                       {"role", "user"}, {"content", prompt}}})},
      {"temperature", params.temperature},
      {"max_tokens", params.max_tokens},
  };

  auto sleeper = sleeper_ ? sleeper_ : [](int ms) {
    std::this_thread::sleep_for(std::chrono::milliseconds(ms));
  };

  std::string last_error;
  int backoff_ms = 1000;
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (attempt > 0) {
      sleeper(backoff_ms);
      backoff_ms *= 2;
    }
    httplib::Client client((scheme + "://" + host).c_str());
    client.set_read_timeout(static_cast<int>(params.timeout_seconds), 0);
    client.set_connection_timeout(static_cast<int>(params.timeout_seconds), 0);
    httplib::Headers headers;
    if (!api_key_.empty()) {
      headers.emplace("Authorization", "Bearer " + api_key_);
    }
    auto res = client.Post(path.c_str(), headers, body.dump(),
                           "application/json");
    if (!res) {
      last_error = "transport error";
      continue;
    }
    if (res->status >= 500) {
      last_error = "server status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw BackendUnavailable("status " + std::to_string(res->status) + ": " +
                               res->body);
    }
    try {
      nlohmann::json j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const std::exception& e) {
      throw BackendUnavailable(std::string("malformed response: ") + e.what());
    }
  }
  throw BackendUnavailable(last_error + " after 3 attempts");
}

Suggestion suggest_rules(const QueryTree& query,
                         const std::vector<Demonstration>& demos,
                         ChatBackend& backend, const ChatParams& params) {
  Suggestion s;
  s.prompt = build_prompt(query, demos);
  const auto t0 = std::chrono::steady_clock::now();
  const std::string raw = backend.complete(s.prompt, params);
  const auto t1 = std::chrono::steady_clock::now();
  s.latency_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  s.response = parse_response(raw);
  return s;
}

}  // namespace rewriter
