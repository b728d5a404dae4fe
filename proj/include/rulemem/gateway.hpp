#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

namespace rulemem {

enum class GatewayMode { live, record, replay };

GatewayMode gateway_mode_from_string(const std::string& name);
std::string to_string(GatewayMode mode);

struct GatewayConfig {
    std::string endpoint = "https://api.openai.com/v1";
    std::string model = "gpt-4-turbo";
    // Keys come from the environment only, never from files or flags.
    std::string api_key_env = "OPENAI_API_KEY";
    double temperature = 0.0;
    int max_retries = 3;
    int backoff_ms = 250;
    GatewayMode mode = GatewayMode::replay;
    std::string cassette_path;
};

class GatewayError : public std::runtime_error {
   public:
    enum class Kind { network, http_status, cassette_miss, exhausted_retries };

    GatewayError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

   private:
    Kind kind_;
};

// Chat-completion client over the OpenAI-compatible JSON shape, with cassette
// recording and replay. Cassettes are JSON Lines: one object per exchange with
// fields digest, request, response, timestamp; lookup is digest-keyed and
// order-independent. Safe for concurrent use; appends are serialized.
class Gateway {
   public:
    // Test seam replacing the HTTP round trip: takes the request body JSON,
    // returns the response body JSON.
    using Transport = std::function<std::string(const std::string& request_body)>;

    explicit Gateway(GatewayConfig config, Transport transport = {});

    // live: POST {endpoint}/chat/completions with retry/backoff on transient
    // failures. record: live call, then append to the cassette; a digest
    // already recorded replays instead. replay: cassette lookup only.
    std::string complete(const std::string& system_text, const std::string& user_text);

    // Digest of the canonical request serialization: the JSON object
    // {"model":..., "system":..., "temperature":..., "user":...} dumped with
    // sorted keys, hashed with 64-bit FNV-1a, rendered as 16 hex digits.
    static std::string digest(const std::string& model, const std::string& system_text,
                              const std::string& user_text, double temperature);

    const GatewayConfig& config() const { return config_; }
    // Live round trips attempted (any mode); stays 0 under pure replay.
    int network_calls() const { return network_calls_; }
    std::size_t cassette_size() const;

   private:
    std::string live_call(const std::string& request_body);
    std::string lookup(const std::string& digest) const;
    void append_entry(const std::string& digest, const std::string& request_body,
                      const std::string& response_body);
    static std::string extract_content(const std::string& response_body);

    GatewayConfig config_;
    Transport transport_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> cassette_;  // digest -> response body
    int network_calls_ = 0;
};

}  // namespace rulemem
