// Copyright 2026-present the hyperpath project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hyperpath/synthetic.h"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "hyperpath/error.h"

namespace hyperpath {

namespace {

constexpr std::array<std::string_view, 16> kSyllables = {"ka", "lo", "mir", "ven", "ta", "ros", "el", "dun",
                                                         "pa", "shi", "nor", "ab", "qui", "te", "zan", "gor"};

constexpr std::array<std::string_view, 10> kRelations = {"founded by",  "born in",   "located in", "spouse of",
                                                         "member of",   "directed by", "capital of", "part of",
                                                         "child of",    "employer of"};

/// Platform-stable sampling on top of mt19937_64 (the std distributions are
/// implementation-defined).
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {
    }

    double
    uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::size_t
    below(std::size_t n) {
        return static_cast<std::size_t>(engine_() % n);
    }

    double
    normal() {
        double u1 = 0.0;
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::vector<double>
    unit(std::size_t dim) {
        std::vector<double> v(dim);
        double sum = 0.0;
        for (auto& x : v) {
            x = normal();
            sum += x * x;
        }
        double norm = std::sqrt(sum);
        for (auto& x : v) {
            x /= norm;
        }
        return v;
    }

private:
    std::mt19937_64 engine_;
};

std::vector<double>
mix(const std::vector<double>& a, double wa, const std::vector<double>& b, double wb) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = wa * a[i] + wb * b[i];
    }
    return out;
}

/// Removes the component along the unit vector axis.
std::vector<double>
orthogonal_to(std::vector<double> v, const std::vector<double>& axis) {
    double dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        dot += v[i] * axis[i];
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] -= dot * axis[i];
    }
    return v;
}

class NameMaker {
public:
    explicit NameMaker(Sampler& sampler) : sampler_(sampler) {
    }

    std::string
    next() {
        while (true) {
            std::string name = word() + " " + word();
            if (used_.insert(name).second) {
                return name;
            }
        }
    }

private:
    std::string
    word() {
        std::string w;
        std::size_t parts = 2 + sampler_.below(2);
        for (std::size_t i = 0; i < parts; ++i) {
            w += kSyllables[sampler_.below(kSyllables.size())];
        }
        w[0] = static_cast<char>(w[0] - 'a' + 'A');
        return w;
    }

    Sampler& sampler_;
    std::set<std::string> used_;
};

Triplet
fact(const std::string& head, std::string_view relation, const std::string& tail) {
    return canonicalize_triplet(head, relation, tail);
}

}  // namespace

SyntheticFixture
gen_synthetic(const SyntheticParams& params) {
    if (params.hops < 2 || params.chains == 0 || params.dimension < 8 || params.context_size == 0) {
        throw Error(ErrorCode::kInvalidParams,
                    fmt::format("synthetic corpus needs hops >= 2, chains >= 1, dimension >= 8 and K >= 1 "
                                "(got hops={}, chains={}, dimension={}, K={})",
                                params.hops, params.chains, params.dimension, params.context_size));
    }
    Sampler sampler(params.seed);
    NameMaker names(sampler);
    SyntheticFixture fx;
    fx.params = params;
    fx.dimension = params.dimension;
    const std::size_t dim = params.dimension;

    for (std::size_t c = 0; c < params.chains; ++c) {
        auto query_axis = sampler.unit(dim);

        std::vector<std::string> entities;
        for (std::size_t j = 0; j <= params.hops; ++j) {
            entities.push_back(names.next());
        }
        std::vector<std::string_view> relations;
        for (std::size_t j = 0; j < params.hops; ++j) {
            relations.push_back(kRelations[sampler.below(kRelations.size())]);
        }

        std::string question = fmt::format("Starting from {}, follow", entities[0]);
        for (std::size_t j = 0; j < params.hops; ++j) {
            question += fmt::format("{} \"{}\"", j == 0 ? "" : ", then", relations[j]);
        }
        question += ". Which entity do you reach?";

        std::vector<Triplet> path;
        for (std::size_t j = 0; j < params.hops; ++j) {
            auto triplet = fact(entities[j], relations[j], entities[j + 1]);
            std::string id = fmt::format("c{:04}-hop{}", c, j);
            std::string text = fmt::format("{} {} {}.", entities[j], relations[j], entities[j + 1]);
            fx.corpus.push_back(
                CorpusRecord{id, text, std::vector<RawTriple>{{entities[j], std::string(relations[j]), entities[j + 1]}}});

            std::vector<double> triplet_vector;
            std::vector<double> text_vector;
            if (j == 0) {
                triplet_vector = mix(query_axis, 1.0, sampler.unit(dim), 0.25);
                text_vector = mix(query_axis, 1.0, sampler.unit(dim), 0.5);
            } else {
                triplet_vector = sampler.unit(dim);
                text_vector = sampler.unit(dim);
            }
            if (j + 1 == params.hops) {
                text_vector = orthogonal_to(std::move(text_vector), query_axis);
            }
            fx.table[render_triplet(triplet)] = triplet_vector;
            fx.table[text] = text_vector;

            path.push_back(triplet);
            if (path.size() >= 2) {
                // Longer prefixes of the path sit closer to the question; the
                // full path is the question vector itself.
                double noise = 0.3 * static_cast<double>(params.hops - path.size()) / static_cast<double>(params.hops);
                fx.table[serialize_hypernode(path)] =
                    path.size() == params.hops ? query_axis : mix(query_axis, 1.0, sampler.unit(dim), noise);
            }
        }
        fx.table[question] = query_axis;
        fx.questions.push_back(QARecord{fmt::format("q{:04}", c), question, {entities.back()},
                                        {fmt::format("c{:04}-hop{}", c, params.hops - 1)}});

        // Distractors come in pairs sharing an entity, topically close to the
        // question but disconnected from the chain.
        std::string shared;
        for (std::size_t d = 0; d < params.distractors; ++d) {
            std::string head = (d % 2 == 1) ? shared : names.next();
            std::string tail = names.next();
            shared = tail;
            auto relation = kRelations[sampler.below(kRelations.size())];
            auto triplet = fact(head, relation, tail);
            std::string id = fmt::format("c{:04}-d{:02}", c, d);
            std::string text = fmt::format("{} {} {}.", head, relation, tail);
            fx.corpus.push_back(CorpusRecord{id, text, std::vector<RawTriple>{{head, std::string(relation), tail}}});
            fx.table[render_triplet(triplet)] = mix(query_axis, 0.5, sampler.unit(dim), 1.0);
            fx.table[text] = mix(query_axis, 0.6, sampler.unit(dim), 1.0);
        }
    }
    return fx;
}

bool
verify_dense_hiding(const SyntheticFixture& fixture) {
    OracleEncoder encoder(fixture.dimension, fixture.table);
    std::vector<std::string> texts;
    std::map<std::string, std::size_t> row_of;
    for (const auto& r : fixture.corpus) {
        row_of[r.id] = texts.size();
        texts.push_back(r.text);
    }
    auto passage_vectors = encoder.encode(texts);
    for (const auto& q : fixture.questions) {
        auto query = encoder.encode_one(q.question);
        for (const auto& gold : q.gold_passage_ids) {
            double gold_cos = cosine(query, passage_vectors.at(row_of.at(gold)));
            std::size_t above = 0;
            for (const auto& v : passage_vectors) {
                if (cosine(query, v) > gold_cos) {
                    ++above;
                }
            }
            if (above < fixture.params.context_size) {
                return false;
            }
        }
    }
    return true;
}

void
write_fixture(const std::filesystem::path& dir, const SyntheticFixture& fixture, bool require_hidden) {
    if (require_hidden && !verify_dense_hiding(fixture)) {
        throw Error(ErrorCode::kInvalidParams,
                    fmt::format("fixture fails the dense-hiding check: some terminal gold passage ranks within the "
                                "dense top-{}; add distractors or chains",
                                fixture.params.context_size));
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::kIoError, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
    }
    write_corpus(dir / "corpus.jsonl", fixture.corpus);
    write_qa(dir / "qa.jsonl", fixture.questions);
    save_embedding_table(dir / "oracle.json", fixture.dimension, fixture.table);
}

}  // namespace hyperpath
