#include "rulemem/gateway.hpp"

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

using nlohmann::json;

namespace rulemem {

GatewayMode gateway_mode_from_string(const std::string& name) {
    if (name == "live") return GatewayMode::live;
    if (name == "record") return GatewayMode::record;
    if (name == "replay") return GatewayMode::replay;
    throw GatewayError(GatewayError::Kind::network, "unknown gateway mode: " + name);
}

std::string to_string(GatewayMode mode) {
    switch (mode) {
        case GatewayMode::live: return "live";
        case GatewayMode::record: return "record";
        case GatewayMode::replay: return "replay";
    }
    return "unknown";
}

namespace {

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace

std::string Gateway::digest(const std::string& model, const std::string& system_text,
                            const std::string& user_text, double temperature) {
    const json canonical = {
        {"model", model}, {"system", system_text}, {"temperature", temperature}, {"user", user_text}};
    return fnv1a_hex(canonical.dump());
}

Gateway::Gateway(GatewayConfig config, Transport transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
    if (config_.temperature < 0.0)
        throw GatewayError(GatewayError::Kind::network, "temperature must be non-negative");
    if (config_.mode == GatewayMode::replay && config_.cassette_path.empty())
        throw GatewayError(GatewayError::Kind::cassette_miss, "replay mode requires a cassette path");
    if (config_.mode == GatewayMode::live) return;
    if (config_.cassette_path.empty()) return;

    std::ifstream in(config_.cassette_path);
    if (!in) {
        if (config_.mode == GatewayMode::replay)
            throw GatewayError(GatewayError::Kind::cassette_miss,
                               "cassette not found: " + config_.cassette_path);
        return;  // record mode starts a fresh cassette
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json entry = json::parse(line);
        cassette_[entry.at("digest").get<std::string>()] = entry.at("response").dump();
    }
}

std::size_t Gateway::cassette_size() const {
    std::lock_guard lock(mutex_);
    return cassette_.size();
}

std::string Gateway::extract_content(const std::string& response_body) {
    json body = json::parse(response_body, nullptr, false);
    if (body.is_discarded() || !body.contains("choices") || body["choices"].empty())
        throw GatewayError(GatewayError::Kind::network,
                           "malformed completion response: " + response_body.substr(0, 200));
    return body["choices"][0].at("message").at("content").get<std::string>();
}

std::string Gateway::lookup(const std::string& digest) const {
    std::lock_guard lock(mutex_);
    auto it = cassette_.find(digest);
    if (it == cassette_.end())
        throw GatewayError(GatewayError::Kind::cassette_miss,
                           "cassette miss for digest " + digest + " in " + config_.cassette_path);
    return it->second;
}

void Gateway::append_entry(const std::string& digest, const std::string& request_body,
                           const std::string& response_body) {
    std::lock_guard lock(mutex_);
    if (cassette_.count(digest)) return;
    cassette_[digest] = response_body;
    json entry = {{"digest", digest},
                  {"request", json::parse(request_body)},
                  {"response", json::parse(response_body)},
                  {"timestamp", std::chrono::duration_cast<std::chrono::seconds>(
                                    std::chrono::system_clock::now().time_since_epoch())
                                    .count()}};
    std::ofstream out(config_.cassette_path, std::ios::app);
    out << entry.dump() << '\n';
}

std::string Gateway::live_call(const std::string& request_body) {
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0 && config_.backoff_ms > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms << (attempt - 1)));
        ++network_calls_;

        if (transport_) {
            try {
                return transport_(request_body);
            } catch (const std::exception& e) {
                last_error = e.what();
                continue;
            }
        }

        const char* key = std::getenv(config_.api_key_env.c_str());
        if (!key || !*key)
            throw GatewayError(GatewayError::Kind::network,
                               "API key environment variable not set: " + config_.api_key_env);

        // endpoint may carry a path prefix ("https://api.openai.com/v1")
        std::string origin = config_.endpoint;
        std::string base_path;
        const std::size_t scheme_end = origin.find("://");
        if (scheme_end != std::string::npos) {
            const std::size_t slash = origin.find('/', scheme_end + 3);
            if (slash != std::string::npos) {
                base_path = origin.substr(slash);
                origin.resize(slash);
            }
        }
        while (!base_path.empty() && base_path.back() == '/') base_path.pop_back();

        httplib::Client client(origin);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);
        client.set_bearer_token_auth(key);
        auto res = client.Post(base_path + "/chat/completions", request_body, "application/json");
        if (!res) {
            last_error = "network error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw GatewayError(GatewayError::Kind::http_status,
                               "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
        return res->body;
    }
    throw GatewayError(GatewayError::Kind::exhausted_retries,
                       "retries exhausted: " + last_error);
}

std::string Gateway::complete(const std::string& system_text, const std::string& user_text) {
    const std::string dig = digest(config_.model, system_text, user_text, config_.temperature);

    if (config_.mode == GatewayMode::replay) return extract_content(lookup(dig));

    if (config_.mode == GatewayMode::record) {
        {
            std::lock_guard lock(mutex_);
            if (auto it = cassette_.find(dig); it != cassette_.end())
                return extract_content(it->second);
        }
        const json request = {{"model", config_.model},
                              {"messages",
                               {{{"role", "system"}, {"content", system_text}},
                                {{"role", "user"}, {"content", user_text}}}},
                              {"temperature", config_.temperature}};
        const std::string body = live_call(request.dump());
        append_entry(dig, request.dump(), body);
        return extract_content(body);
    }

    const json request = {{"model", config_.model},
                          {"messages",
                           {{{"role", "system"}, {"content", system_text}},
                            {{"role", "user"}, {"content", user_text}}}},
                          {"temperature", config_.temperature}};
    return extract_content(live_call(request.dump()));
}

}  // namespace rulemem
