"""digraph-perf - 有向图上一阶/二阶共识网络的 H2/L2 性能分析。"""
__version__ = "0.1.0"
