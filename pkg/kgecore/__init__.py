"""KGECore 知识图谱嵌入对抗训练核心框架"""

__version__ = "0.1.0"
