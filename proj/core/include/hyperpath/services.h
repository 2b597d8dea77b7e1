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

#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperpath/encoding.h"

namespace hyperpath {

/// Connection settings for an OpenAI-style HTTP service.
struct ServiceConfig {
    std::string url;      // full endpoint, e.g. https://host/v1/embeddings
    std::string model;
    std::string api_key;  // sent as "Authorization: Bearer <key>" when set
    std::size_t max_in_flight = 4;
    std::size_t max_retries = 3;
    std::chrono::milliseconds initial_backoff{250};
    std::chrono::seconds timeout{60};

    /// Reads <prefix>_URL, <prefix>_MODEL and <prefix>_KEY. Missing URL is a
    /// kConfigError.
    static ServiceConfig
    from_env(std::string_view prefix);
};

/// POSTs JSON bodies, retrying connection failures, 429 and 5xx replies with
/// exponential backoff. Other 4xx replies fail at once. Failures surface as
/// Error(kServiceUnreachable).
class JsonPoster {
public:
    explicit JsonPoster(ServiceConfig config);

    std::string
    post(const std::string& body) const;

    const ServiceConfig&
    config() const noexcept {
        return config_;
    }

private:
    ServiceConfig config_;
    std::string origin_;
    std::string path_;
};

/// Client for an embeddings endpoint:
///   request  {"model": m, "input": [texts]}
///   reply    {"data": [{"index": i, "embedding": [..]}, ...]}
/// Texts are sent in batches with at most max_in_flight concurrent requests.
class RemoteEncoder final : public Encoder {
public:
    static constexpr std::size_t kDefaultBatchSize = 64;

    /// A dimension of 0 is discovered with a probe request on first use.
    RemoteEncoder(ServiceConfig config, std::size_t dimension = 0, std::size_t batch_size = kDefaultBatchSize);

    std::size_t
    dimension() const override;

    std::string
    id() const override;

protected:
    std::vector<std::vector<double>>
    embed(std::span<const std::string> texts) const override;

private:
    std::vector<std::vector<double>>
    embed_batch(std::span<const std::string> texts) const;

    JsonPoster poster_;
    std::size_t batch_size_;
    mutable std::once_flag probe_once_;
    mutable std::size_t dimension_;
};

struct ChatMessage {
    std::string role;
    std::string content;
};

class ChatClient {
public:
    virtual ~ChatClient() = default;

    /// Returns the assistant reply text. Implementations must be safe to call
    /// from several threads.
    virtual std::string
    complete(std::span<const ChatMessage> messages) const = 0;
};

/// Chat-completion endpoint:
///   request  {"model": m, "messages": [{"role", "content"}...]}
///   reply    {"choices": [{"message": {"content": "..."}}]}
class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(ServiceConfig config);

    std::string
    complete(std::span<const ChatMessage> messages) const override;

    const ServiceConfig&
    config() const noexcept {
        return poster_.config();
    }

private:
    JsonPoster poster_;
};

}  // namespace hyperpath
