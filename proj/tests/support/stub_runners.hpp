#pragma once

// Shell-script stand-ins for the simulation executable. The pipeline invokes
// them as `<exe> -in <script> -log <log>` with the working directory set to
// the sample's scratch folder, so "$2" is the input path and "$4" the log.

#include <sys/stat.h>

#include <filesystem>
#include <fstream>
#include <string>

namespace stub {

inline std::string write_runner(const std::filesystem::path& dir,
                                const std::string& name,
                                const std::string& body) {
    std::filesystem::create_directories(dir);
    std::filesystem::path path = dir / name;
    {
        std::ofstream out(path);
        out << "#!/bin/sh\n" << body;
    }
    ::chmod(path.c_str(), 0755);
    return path.string();
}

// Succeeds and leaves a completion line in the log.
inline std::string ok_runner(const std::filesystem::path& dir) {
    return write_runner(dir, "ok_runner.sh",
                        "echo \"LAMMPS (stub)\" > \"$4\"\n"
                        "echo \"Total wall time: 0:00:00\" >> \"$4\"\n"
                        "exit 0\n");
}

// Fails with a pair-style error, the shape the fallback transform targets.
inline std::string fail_runner(const std::filesystem::path& dir) {
    return write_runner(dir, "fail_runner.sh",
                        "echo \"ERROR: Unrecognized pair style 'eam/alloyx'\" > \"$4\"\n"
                        "exit 1\n");
}

// Fails on the original script but succeeds once the pair style has been
// replaced, so the retry path is exercised end to end.
inline std::string psz_runner(const std::filesystem::path& dir) {
    return write_runner(dir, "psz_runner.sh",
                        "if grep -q \"pair_style zero\" \"$2\"; then\n"
                        "  echo \"Total wall time: 0:00:00\" > \"$4\"\n"
                        "  exit 0\n"
                        "fi\n"
                        "echo \"ERROR: Unknown pair style in input\" > \"$4\"\n"
                        "exit 1\n");
}

// Fails with an error that has nothing to do with potentials.
inline std::string nonpair_fail_runner(const std::filesystem::path& dir) {
    return write_runner(dir, "nonpair_fail_runner.sh",
                        "echo \"ERROR: Lost atoms: original 4000 current 3998\" > \"$4\"\n"
                        "exit 1\n");
}

// Sleeps past any reasonable deadline; used to exercise the timeout kill.
inline std::string slow_runner(const std::filesystem::path& dir) {
    return write_runner(dir, "slow_runner.sh",
                        "sleep 20\n"
                        "echo done > \"$4\"\n"
                        "exit 0\n");
}

}  // namespace stub
