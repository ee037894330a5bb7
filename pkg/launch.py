"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0
"""

#!/usr/bin/env python3
"""
LAUNCH.PY - единая точка входа
Запуск: python launch.py solve --masses 1,1,1,1
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))


def check_python():
    if sys.version_info < (3, 8):
        print("❌ Требуется Python 3.8+", file=sys.stderr)
        sys.exit(1)


def check_imports():
    required = ['numpy', 'scipy', 'torch']
    missing = []
    for lib in required:
        try:
            __import__(lib)
        except ImportError:
            missing.append(lib)
    return missing


def main():
    check_python()
    missing = check_imports()
    if missing:
        print(f"❌ Не хватает: {', '.join(missing)}", file=sys.stderr)
        print(f"   Установи: pip install {' '.join(missing)}", file=sys.stderr)
        sys.exit(1)

    from shell.ccc4_shell import main as shell_main
    return shell_main(sys.argv[1:])


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n🛑 Остановлено пользователем", file=sys.stderr)
        sys.exit(130)
