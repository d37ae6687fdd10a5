# Directory for all common code