from app.libs.synthgen.generator import RAW_FLOOR, generate, probeset_name, read_truth, write_truth

__all__ = ["RAW_FLOOR", "generate", "probeset_name", "read_truth", "write_truth"]
