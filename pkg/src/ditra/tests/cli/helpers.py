# tests/cli/helpers.py
SMALL_FRAMES = ["--set", "frame_count=5", "--set", "frame_height=96", "--set", "frame_width=128"]
TINY_MODEL = [
    "--set", "model.input_size=64",
    "--set", "model.channels=16",
    "--set", "model.heads=2",
    "--set", "model.fusion_layers=1",
    "--set", "train.phase1_epochs=2",
    "--set", "train.phase1_decay_epoch=1",
    "--set", "train.phase2_epochs=2",
    "--set", "train.phase2_decay_epoch=1",
    "--set", "train.batch_size=2",
]
