"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0
"""

#!/usr/bin/env python3
"""
Установщик CCC4
"""

import json
import os
import subprocess
import sys
from pathlib import Path


class Ccc4Installer:
    def __init__(self):
        self.python_version = sys.version_info
        self.project_root = Path(__file__).parent
        self.requirements = self.project_root / "requirements.txt"

    def check_prerequisites(self):
        """Проверяет системные требования"""
        print("=" * 50)
        print("Проверка системных требований...")
        print("=" * 50)

        checks = []

        if self.python_version >= (3, 8):
            checks.append(("✅ Python 3.8+", True))
        else:
            checks.append(("❌ Python 3.8+ требуется", False))

        # Ядра: по ним выбирается число процессов скана
        import psutil
        cores = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
        checks.append((f"✅ Ядер CPU: {cores}", True))

        memory_gb = psutil.virtual_memory().total / (1024**3)
        if memory_gb >= 2:
            checks.append((f"✅ Оперативная память: {memory_gb:.1f} GB", True))
        else:
            checks.append((f"⚠️  Мало памяти: {memory_gb:.1f} GB (рекомендуется 2+ GB)", False))

        for check, passed in checks:
            print(check)

        return all(passed for _, passed in checks)

    def install_dependencies(self):
        """Устанавливает зависимости"""
        print("\n" + "=" * 50)
        print("Установка зависимостей...")
        print("=" * 50)

        if not self.requirements.exists():
            print("❌ Файл requirements.txt не найден")
            return False

        try:
            subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", str(self.requirements)])
            print("✅ Зависимости установлены успешно")
            return True
        except subprocess.CalledProcessError as e:
            print(f"❌ Ошибка установки: {e}")
            return False

    def setup_directories(self):
        """Создаёт data/logs и конфиг по умолчанию"""
        print("\n" + "=" * 50)
        print("Создание структуры директорий...")
        print("=" * 50)

        for directory in ["data", "data/logs", "config"]:
            (self.project_root / directory).mkdir(parents=True, exist_ok=True)
            print(f"📁 Создано: {directory}")

        config_file = self.project_root / "config" / "system_config.json"
        if not config_file.exists():
            sys.path.insert(0, str(self.project_root))
            from core.config import DEFAULT_CONFIG
            config_file.write_text(json.dumps(DEFAULT_CONFIG, indent=2, ensure_ascii=False), encoding='utf-8')
            print("📄 Создано: config/system_config.json")
        return True

    def suggest_workers(self):
        """Записывает performance.max_workers по числу физических ядер"""
        import psutil
        cores = psutil.cpu_count(logical=False) or 1
        config_file = self.project_root / "config" / "system_config.json"
        config = json.loads(config_file.read_text(encoding='utf-8'))
        config.setdefault("performance", {})["max_workers"] = max(1, cores)
        config_file.write_text(json.dumps(config, indent=2, ensure_ascii=False), encoding='utf-8')
        print(f"⚙️  performance.max_workers = {max(1, cores)}")

    def verify_installation(self):
        """Проверяет установку"""
        print("\n" + "=" * 50)
        print("Проверка установки...")
        print("=" * 50)

        checks = []
        for module in ("numpy", "scipy", "pandas", "torch", "psutil", "pytest"):
            try:
                __import__(module)
                checks.append((f"✅ {module}", True))
            except ImportError as e:
                checks.append((f"❌ {e}", False))

        for filepath in ["data/logs", "config/system_config.json"]:
            if (self.project_root / filepath).exists():
                checks.append((f"✅ {filepath}", True))
            else:
                checks.append((f"❌ {filepath}", False))

        all_passed = True
        for check, passed in checks:
            print(check)
            all_passed = all_passed and passed
        return all_passed

    def post_install_instructions(self):
        print("\n" + "=" * 50)
        print("✅ УСТАНОВКА ЗАВЕРШЕНА")
        print("=" * 50)
        print("""
        ДАЛЬНЕЙШИЕ ШАГИ:

        1. РАВНЫЕ МАССЫ (квадрат):
           python launch.py solve --masses 1,1,1,1

        2. ТОЖДЕСТВА:
           python launch.py identities --samples 10000 --seed 1

        3. СКАН:
           python launch.py scan --grid 6 --out data/scan.csv

        4. ТЕСТЫ:
           pytest            (быстрые)
           pytest -m slow    (полные прогоны)
        """)

    def run(self):
        print("🚀 УСТАНОВЩИК CCC4")
        print("=" * 50)

        if not self.check_prerequisites():
            print("\n❌ Системные требования не выполнены")
            response = input("Продолжить установку? (y/N): ")
            if response.lower() != 'y':
                return False

        if not self.install_dependencies():
            print("\n❌ Ошибка установки зависимостей")
            return False

        self.setup_directories()
        self.suggest_workers()

        if not self.verify_installation():
            print("\n⚠️  Установка завершена с предупреждениями")
        else:
            print("\n✅ Установка успешно завершена")

        self.post_install_instructions()
        return True


if __name__ == "__main__":
    os.chdir(Path(__file__).parent)
    installer = Ccc4Installer()
    if not installer.run():
        print("\n💥 Установка не удалась. Проверь ошибки выше.")
        sys.exit(1)
