#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gridcast/panel.hpp>

namespace gridcast::testing {

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
	explicit TempDir(const std::string& tag) {
		static std::atomic<unsigned> counter{0};
		path_ = std::filesystem::temp_directory_path() /
		        ("gridcast_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
		std::filesystem::create_directories(path_);
	}
	~TempDir() {
		std::error_code ec;
		std::filesystem::remove_all(path_, ec);
	}
	TempDir(const TempDir&) = delete;
	TempDir& operator=(const TempDir&) = delete;

	const std::filesystem::path& path() const { return path_; }
	std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
	std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
	std::ofstream out(path, std::ios::binary);
	out << content;
}

inline std::string read_file(const std::string& path) {
	std::ifstream in(path, std::ios::binary);
	std::ostringstream buf;
	buf << in.rdbuf();
	return buf.str();
}

/// Panel with explicit cell values; weather features named w0..w{F-1},
/// every row present. Cells can be overwritten afterwards.
inline PanelDataset make_panel(std::size_t hours, const std::vector<std::string>& counties,
                               std::size_t n_features, EpochHour start = 466344) {
	std::vector<FeatureMeta> features;
	for (std::size_t f = 0; f < n_features; ++f) {
		features.push_back({"w" + std::to_string(f), FeatureMeta::Kind::weather, {}});
	}
	PanelDataset panel(TimeIndex{start, hours}, counties, features);
	for (std::size_t i = 0; i < hours; ++i) {
		for (std::size_t c = 0; c < counties.size(); ++c) panel.set_row_present(i, c);
	}
	return panel;
}

} // namespace gridcast::testing
