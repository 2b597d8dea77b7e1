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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "hyperpath/services.h"

#include <fmt/format.h>

#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "hyperpath/error.h"
#include "json.hpp"
#include "parallel.h"

namespace hyperpath {

namespace {

using nlohmann::json;

std::string
env_or_empty(const std::string& name) {
    const char* value = std::getenv(name.c_str());
    return value ? std::string(value) : std::string();
}

/// Splits "scheme://host[:port]/path" into ("scheme://host[:port]", "/path").
std::pair<std::string, std::string>
split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::kConfigError, fmt::format("service URL \"{}\" has no scheme", url));
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

bool
is_transient(int status) {
    return status == 429 || status >= 500;
}

}  // namespace

ServiceConfig
ServiceConfig::from_env(std::string_view prefix) {
    std::string p(prefix);
    ServiceConfig config;
    config.url = env_or_empty(p + "_URL");
    config.model = env_or_empty(p + "_MODEL");
    config.api_key = env_or_empty(p + "_KEY");
    if (config.url.empty()) {
        throw Error(ErrorCode::kConfigError, fmt::format("{}_URL is not set", p));
    }
    return config;
}

JsonPoster::JsonPoster(ServiceConfig config) : config_(std::move(config)) {
    std::tie(origin_, path_) = split_url(config_.url);
}

std::string
JsonPoster::post(const std::string& body) const {
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    std::string last_problem;
    auto backoff = config_.initial_backoff;
    for (std::size_t attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        httplib::Client client(origin_);
        client.set_connection_timeout(config_.timeout);
        client.set_read_timeout(config_.timeout);
        client.set_write_timeout(config_.timeout);
        auto res = client.Post(path_, headers, body, "application/json");
        if (!res) {
            last_problem = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) {
            return res->body;
        }
        last_problem = fmt::format("HTTP {}", res->status);
        if (!is_transient(res->status)) {
            break;
        }
    }
    throw Error(ErrorCode::kServiceUnreachable, fmt::format("POST {} failed: {}", config_.url, last_problem));
}

RemoteEncoder::RemoteEncoder(ServiceConfig config, std::size_t dimension, std::size_t batch_size)
    : poster_(std::move(config)), batch_size_(std::max<std::size_t>(1, batch_size)), dimension_(dimension) {
}

std::size_t
RemoteEncoder::dimension() const {
    std::call_once(probe_once_, [this] {
        if (dimension_ == 0) {
            std::string probe = "dimension probe";
            dimension_ = embed_batch(std::span<const std::string>(&probe, 1)).front().size();
        }
    });
    return dimension_;
}

std::string
RemoteEncoder::id() const {
    return fmt::format("remote:{}", poster_.config().model);
}

std::vector<std::vector<double>>
RemoteEncoder::embed(std::span<const std::string> texts) const {
    std::size_t batches = (texts.size() + batch_size_ - 1) / batch_size_;
    std::vector<std::vector<std::vector<double>>> parts(batches);
    detail::run_bounded(batches, poster_.config().max_in_flight, [&](std::size_t b) {
        auto begin = b * batch_size_;
        auto count = std::min(batch_size_, texts.size() - begin);
        parts[b] = embed_batch(texts.subspan(begin, count));
    });
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (auto& part : parts) {
        for (auto& row : part) {
            out.push_back(std::move(row));
        }
    }
    return out;
}

std::vector<std::vector<double>>
RemoteEncoder::embed_batch(std::span<const std::string> texts) const {
    json request = {{"model", poster_.config().model}, {"input", texts}};
    std::string reply;
    try {
        reply = poster_.post(request.dump());
    } catch (const Error& e) {
        throw Error(ErrorCode::kEncoderFailure, e.what());
    }
    std::vector<std::vector<double>> out(texts.size());
    try {
        auto doc = json::parse(reply);
        const auto& data = doc.at("data");
        if (data.size() != texts.size()) {
            throw Error(ErrorCode::kEncoderFailure,
                        fmt::format("embedding reply has {} items for {} inputs", data.size(), texts.size()));
        }
        for (const auto& item : data) {
            auto index = item.at("index").get<std::size_t>();
            if (index >= out.size() || !out[index].empty()) {
                throw Error(ErrorCode::kEncoderFailure, fmt::format("embedding reply has bad index {}", index));
            }
            out[index] = item.at("embedding").get<std::vector<double>>();
            if (out[index].empty()) {
                throw Error(ErrorCode::kEncoderFailure, "embedding reply has an empty vector");
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kEncoderFailure, fmt::format("malformed embedding reply: {}", e.what()));
    }
    return out;
}

HttpChatClient::HttpChatClient(ServiceConfig config) : poster_(std::move(config)) {
}

std::string
HttpChatClient::complete(std::span<const ChatMessage> messages) const {
    json request;
    request["model"] = poster_.config().model;
    request["messages"] = json::array();
    for (const auto& m : messages) {
        request["messages"].push_back({{"role", m.role}, {"content", m.content}});
    }
    auto reply = poster_.post(request.dump());
    try {
        auto doc = json::parse(reply);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kParseError, fmt::format("malformed chat reply: {}", e.what()));
    }
}

}  // namespace hyperpath
