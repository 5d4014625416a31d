"""Build the extension with cargo and copy it next to the smoke test."""

import pathlib
import shutil
import subprocess
import sys
import sysconfig

root = pathlib.Path(__file__).resolve().parent.parent
subprocess.run(
    ["cargo", "build", "--release", "-p", "normattain-py", "--features", "extension-module"],
    cwd=root,
    check=True,
)
lib = root / "target" / "release" / ("normattain_py.dll" if sys.platform == "win32" else
                                     "libnormattain_py.dylib" if sys.platform == "darwin" else
                                     "libnormattain_py.so")
suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
dest = pathlib.Path(__file__).resolve().parent / f"normattain{suffix}"
shutil.copyfile(lib, dest)
print(dest)
