#include "optforge/generator.hpp"

#include <httplib.h>

namespace optforge {

namespace {

struct Url {
    std::string origin; // scheme://host[:port]
    std::string path;
};

Url split_url(const std::string& url)
{
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw Error("endpoint must be an absolute URL: '" + url + "'");
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace

CandidateGenerator::HttpPost http_transport()
{
    return [](const std::string& url, const std::string& body, const std::string& token,
              std::chrono::milliseconds timeout) -> std::pair<int, std::string> {
        Url target = split_url(url);
        httplib::Client client(target.origin);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        httplib::Headers headers;
        if (!token.empty())
            headers.emplace("Authorization", "Bearer " + token);
        auto response = client.Post(target.path, headers, body, "application/json");
        if (!response)
            throw BackendUnavailable("request to " + url + " failed: " +
                                     httplib::to_string(response.error()));
        return {response->status, response->body};
    };
}

} // namespace optforge
