"""KGECore 命令行入口"""

import sys
from pathlib import Path

# 确保项目根目录在 Python 路径中
# 如果是打包环境，使用可执行文件所在目录；如果是源码环境，使用 main.py 所在目录
if getattr(sys, "frozen", False):
    BASE_DIR = Path(sys.executable).parent.absolute()
else:
    BASE_DIR = Path(__file__).parent.absolute()

sys.path.insert(0, str(BASE_DIR))


def main() -> int:
    """主函数"""
    # 延迟导入，确保 sys.path 已更新
    from kgecore.cli.app import main as cli_main

    return cli_main()


if __name__ == "__main__":
    sys.exit(main())
