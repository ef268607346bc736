#pragma once

// External-process harness: writes a script into a scratch directory, invokes
// `<exe> -in <file> -log <logfile>`, enforces a wall-clock timeout with
// SIGKILL, and captures the final non-empty line of the log as the outcome
// signal. Executable absence is a distinct error from script failure.

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lmplint/result.hpp"
#include "lmplint/text.hpp"

namespace lmplint {

struct RunnerConfig {
    std::string executable;
    std::string work_dir;
    double timeout_seconds = 60.0;
    std::string script_filename = "input.in";
    std::string log_filename = "log.lammps";
    std::string console_filename = "console.out";
};

struct ExecOutcome {
    bool ok = false;  // exited normally with status 0
    int exit_code = -1;
    bool timed_out = false;
    double wall_seconds = 0.0;
    std::string last_log_line;
    std::string log_path;
};

struct RunnerUnavailable {
    std::string message;
};

// PATH-aware lookup; names containing '/' are used as given.
inline std::optional<std::string> resolve_executable(const std::string& exe) {
    if (exe.empty()) return std::nullopt;
    if (exe.find('/') != std::string::npos) {
        if (::access(exe.c_str(), X_OK) == 0) return exe;
        return std::nullopt;
    }
    const char* path = std::getenv("PATH");
    if (!path) return std::nullopt;
    std::string dirs(path);
    std::size_t begin = 0;
    while (begin <= dirs.size()) {
        std::size_t end = dirs.find(':', begin);
        if (end == std::string::npos) end = dirs.size();
        std::string dir = dirs.substr(begin, end - begin);
        if (!dir.empty()) {
            std::string candidate = dir + "/" + exe;
            if (::access(candidate.c_str(), X_OK) == 0) return candidate;
        }
        begin = end + 1;
    }
    return std::nullopt;
}

inline std::string last_nonempty_line(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "";
    std::string line, last;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed{trim(line)};
        if (!trimmed.empty()) last = trimmed;
    }
    return last;
}

inline result<ExecOutcome, RunnerUnavailable> run_external(
    const std::string& script_text, const RunnerConfig& config) {
    auto exe = resolve_executable(config.executable);
    if (!exe)
        return RunnerUnavailable{"runner executable '" + config.executable +
                                 "' not found or not executable"};

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.work_dir, ec);
    if (ec)
        return RunnerUnavailable{"cannot create work dir '" + config.work_dir +
                                 "': " + ec.message()};

    const std::string script_path = config.work_dir + "/" + config.script_filename;
    const std::string log_path = config.work_dir + "/" + config.log_filename;
    {
        std::ofstream out(script_path, std::ios::binary | std::ios::trunc);
        if (!out)
            return RunnerUnavailable{"cannot write script to '" + script_path + "'"};
        out << script_text;
    }
    ::unlink(log_path.c_str());  // stale logs must not leak into this outcome

    const auto start = std::chrono::steady_clock::now();
    pid_t pid = ::fork();
    if (pid < 0) return RunnerUnavailable{"fork failed"};
    if (pid == 0) {
        if (::chdir(config.work_dir.c_str()) != 0) ::_exit(126);
        int fd = ::open(config.console_filename.c_str(),
                        O_CREAT | O_WRONLY | O_TRUNC, 0644);
        if (fd >= 0) {
            ::dup2(fd, 1);
            ::dup2(fd, 2);
            ::close(fd);
        }
        ::execl(exe->c_str(), exe->c_str(), "-in", config.script_filename.c_str(),
                "-log", config.log_filename.c_str(),
                static_cast<char*>(nullptr));
        ::_exit(127);
    }

    ExecOutcome outcome;
    outcome.log_path = log_path;
    const auto deadline =
        start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(config.timeout_seconds));
    int status = 0;
    for (;;) {
        pid_t done = ::waitpid(pid, &status, WNOHANG);
        if (done == pid) break;
        if (done < 0) {
            status = -1;
            break;
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            ::kill(pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            outcome.timed_out = true;
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    outcome.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (!outcome.timed_out && WIFEXITED(status))
        outcome.exit_code = WEXITSTATUS(status);
    outcome.ok = !outcome.timed_out && WIFEXITED(status) &&
                 WEXITSTATUS(status) == 0;
    outcome.last_log_line = last_nonempty_line(log_path);
    return outcome;
}

}  // namespace lmplint
