NAME = "JADCE"
VERSION = "0.3.0"
AUTHOR = "JADCE developers"
